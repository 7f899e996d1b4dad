use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{build_mask, DomainMask, Region};
use crate::operator::{assemble, count_below, k_smallest, Potential};
use crate::oracles::{halfstrip_spectrum, rectangle_eigs, strip_room_energy, HalfStripSpec, BESSEL_J0_FIRST_ZERO};
use crate::partition::{energy_strong, EnergyReport};
use crate::pnorm::PNorm;
use crate::spectrum::{count_bounds, threshold, CountReport, SigmaEstimate, ThresholdReport};

use super::config::ScenarioConfig;
use super::run::{partition_artifacts, ring_result, sigma_from_config, solve_partition, solve_with_threshold, Artifact, RingResult, SolveResult};
use super::sweep::{sweep_with, SweepAxis, SweepTable};

/// Level offset below `Sigma` used for eigenvalue counts.
pub const COUNT_OFFSET: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSolve {
    #[serde(flatten)]
    pub solve: SolveResult,
    /// Grid-free values the eigenvalues are compared against.
    pub oracle: Vec<f64>,
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripResult {
    pub sweep: SweepTable,
    pub strictly_decreasing: bool,
    pub final_energy: Option<f64>,
    pub sigma_oracle: f64,
    pub room_j: u32,
    pub room_energy: f64,
    /// `|room_energy - 1| <= 1e-3`.
    pub room_within_tol: bool,
    pub rooms: Vec<(u32, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WatermelonResult {
    pub r: f64,
    pub c: f64,
    pub energy: EnergyReport,
    pub ball_lambda: f64,
    /// `j_{0,1}^2 / r^2`.
    pub ball_oracle: f64,
    pub sector_lambdas: Vec<f64>,
    /// Largest `|lambda_sector - c| / c`.
    pub sector_deviation: f64,
    pub gap: f64,
    pub non_equipartition: bool,
    /// Eigenvalues of the whole domain below `c`.
    pub count_below_c: usize,
    pub sigma: Option<SigmaEstimate>,
    pub threshold: Option<ThresholdReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfStripResult {
    pub spec: HalfStripSpec,
    pub m: usize,
    pub lambda0: f64,
    pub oracle: Vec<f64>,
    pub sigma_oracle: f64,
    pub eigenvalues: Vec<f64>,
    pub max_error: f64,
    /// Eigenvalues below `sigma_oracle - 1e-3` on the truncated domain.
    pub count: usize,
    pub sigma: SigmaEstimate,
    pub sigma_error: f64,
    /// `Lambda_{k,inf}` for `k = 1..=k_max`.
    pub partition_energies: Vec<f64>,
    pub counting: CountReport,
    pub threshold: ThresholdReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripBallResult {
    pub energy: EnergyReport,
    pub ball_lambda: f64,
    pub strip_lambdas: Vec<f64>,
    pub sigma_oracle: f64,
    pub eigenvalues: Vec<f64>,
    pub sigma: Option<SigmaEstimate>,
    pub threshold: Option<ThresholdReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoPotentialResult {
    pub rings: RingResult,
    pub sigma: Option<SigmaEstimate>,
    pub threshold: Option<ThresholdReport>,
}

pub(crate) fn run_example(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let name = config.example.as_ref().map(|e| e.name.as_str()).unwrap_or_default();
    match name {
        "square" => square(config),
        "strip" => strip(config),
        "watermelon" => watermelon(config),
        "halfstrip" => halfstrip(config),
        "stripball" => stripball(config),
        "nopotential" => nopotential(config),
        "harmonic" => harmonic(config),
        _ => Err(Error::InvalidConfig(format!(
            "unknown example '{name}'; known: {}",
            ScenarioConfig::names().join(", ")
        ))),
    }
}

fn oracle_solve(config: &ScenarioConfig, oracle: Vec<f64>) -> Result<(Value, Vec<Artifact>)> {
    let domain = config.domain.mask()?;
    let (solve, state, eigen) = solve_with_threshold(&domain, config, false)?;
    let max_error = solve.eigenvalues.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let artifacts = partition_artifacts(&state, &eigen)?;
    Ok((serde_json::to_value(OracleSolve { solve, oracle, max_error })?, artifacts))
}

fn square(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let g = config.domain.grid()?;
    let (a, b) = (g.extent(0), if g.dim() > 1 { g.extent(1) } else { 0.0 });
    let oracle = if g.dim() == 2 { rectangle_eigs(a, b, config.k) } else { crate::oracles::interval_eigs(a, config.k) };
    oracle_solve(config, oracle)
}

/// Oscillator levels `2(n1 + n2 + 1)` in 2-D, `2n + 1` in 1-D.
fn harmonic(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let d = config.domain.grid()?.dim();
    let mut levels: Vec<f64> = if d == 2 {
        (0..config.k + 1).flat_map(|a| (0..config.k + 1).map(move |b| 2.0 * (a + b + 1) as f64)).collect()
    } else {
        (0..config.k + 1).map(|n| (2 * n + 1) as f64).collect()
    };
    levels.sort_by(f64::total_cmp);
    levels.truncate(config.k);
    oracle_solve(config, levels)
}

fn strip(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let ex = config.example.as_ref().expect("example table checked by validate");
    let values = if ex.values.is_empty() { vec![8.0, 16.0, 32.0] } else { ex.values.clone() };
    let lo = config.domain.lo[0];
    let table = sweep_with(config, SweepAxis::Window, &values, |c, r| {
        // Persson radii scale with the truncation
        let len = r - lo;
        c.sigma.exact = None;
        c.sigma.radii = vec![lo + 0.25 * len, lo + 0.5 * len, lo + 0.75 * len];
    })?;
    let energies: Vec<Option<f64>> = table.energies();
    let strictly_decreasing = energies.iter().all(Option::is_some)
        && energies.windows(2).all(|w| w[1].unwrap() < w[0].unwrap());
    let j = ex.room_j.unwrap_or(20);
    let room_energy = strip_room_energy(j);
    let result = StripResult {
        final_energy: *energies.last().unwrap(),
        strictly_decreasing,
        sigma_oracle: 1.0,
        room_j: j,
        room_energy,
        room_within_tol: (room_energy - 1.0).abs() <= 1e-3,
        rooms: (1..=j).map(|i| (i, strip_room_energy(i))).collect(),
        sweep: table,
    };
    let csv = result.sweep.to_csv();
    Ok((serde_json::to_value(&result)?, vec![Artifact::text("sweep.csv", csv)]))
}

/// Cells `B_r` and `k - 1` equal sectors of the exterior of `B_r`.
pub fn watermelon_cells(domain: &DomainMask, r: f64, k: usize) -> Result<Vec<DomainMask>> {
    if k < 2 {
        return Err(Error::Precondition("watermelon needs k >= 2".into()));
    }
    let grid = domain.grid();
    let mut cells = vec![build_mask(&Region::ball(&[0.0, 0.0], r), grid)?.intersection(domain)?];
    let span = TAU / (k - 1) as f64;
    for j in 0..k - 1 {
        let s = Region::sector(&[0.0, 0.0], j as f64 * span, (j + 1) as f64 * span, r, f64::INFINITY);
        cells.push(build_mask(&s, grid)?.intersection(domain)?);
    }
    Ok(cells)
}

fn watermelon(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let Potential::RadialStep { r, c } = config.potential else {
        return Err(Error::InvalidConfig("watermelon needs a radial_step potential".into()));
    };
    let domain = config.domain.mask()?;
    let cells = watermelon_cells(&domain, r, config.k)?;
    let energy = energy_strong(&cells, &config.potential, config.p, config.tol)?;
    let ball_lambda = energy.lambdas[0];
    let sector_lambdas = energy.lambdas[1..].to_vec();
    let sector_deviation = sector_lambdas.iter().map(|l| (l - c).abs() / c).fold(0.0, f64::max);
    let gap = energy.equipartition_gap;
    let form = assemble(&domain, &config.potential)?;
    let count_below_c = count_below(&form, c)?;
    let (sigma, t) = construction_threshold(&domain, config, config.k, energy.strong)?;
    let result = WatermelonResult {
        r,
        c,
        ball_lambda,
        ball_oracle: (BESSEL_J0_FIRST_ZERO / r).powi(2),
        sector_lambdas,
        sector_deviation,
        gap,
        non_equipartition: gap > 10.0 * config.tol && ball_lambda < c,
        count_below_c,
        sigma,
        threshold: t,
        energy,
    };
    Ok((serde_json::to_value(&result)?, vec![label_artifact(&domain, &cells)?]))
}

/// Threshold comparison for an explicit construction; only `p = inf` needs no `Lambda_{k-1,p}`.
fn construction_threshold(
    domain: &DomainMask,
    config: &ScenarioConfig,
    k: usize,
    energy: f64,
) -> Result<(Option<SigmaEstimate>, Option<ThresholdReport>)> {
    let Some((s, _)) = sigma_from_config(domain, config)? else {
        return Ok((None, None));
    };
    let t = config
        .p
        .is_inf()
        .then(|| threshold(k, PNorm::INF, s.sigma, 0.0).with_energy(energy, s.uncertainty + config.tol));
    Ok((Some(s), t))
}

fn label_artifact(domain: &DomainMask, cells: &[DomainMask]) -> Result<Artifact> {
    let grid = domain.grid();
    let mut labels = vec![0u32; grid.len()];
    for (i, c) in cells.iter().enumerate() {
        for idx in c.indices() {
            labels[idx] = i as u32 + 1;
        }
    }
    let mut bytes = Vec::new();
    crate::io::write_label_pgm(&mut bytes, grid.counts(), &labels)?;
    Ok(Artifact { name: "cells.pgm".into(), bytes })
}

/// Half-strip spec with exactly `m` bound states whose width `ell pi` is a lattice multiple of `h`.
pub fn halfstrip_for_grid(l: f64, c: f64, m: usize, h: f64) -> Result<HalfStripSpec> {
    let ideal = HalfStripSpec::for_count(l, c, m)?;
    let width = (ideal.width() / h).round().max(2.0) * h;
    let spec = HalfStripSpec { ell: width / PI, l, c };
    let found = halfstrip_spectrum(&spec, 1)?.m;
    if found != m {
        return Err(Error::InvalidConfig(format!(
            "grid spacing {h} is too coarse to resolve a half-strip with {m} bound states (got {found})"
        )));
    }
    Ok(spec)
}

/// The scenario domain replaced by the truncated half-strip of `spec`.
pub fn halfstrip_config(config: &ScenarioConfig, spec: &HalfStripSpec) -> ScenarioConfig {
    let mut c = config.clone();
    let width = spec.width();
    c.domain.region = Region::Halfstrip { start: 0.0, lo: 0.0, width };
    c.domain.lo = vec![0.0, 0.0];
    c.domain.hi = vec![config.domain.hi[0], width];
    c.domain.snap = true;
    c
}

fn halfstrip(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let Potential::AxialStep { l, c } = config.potential else {
        return Err(Error::InvalidConfig("halfstrip needs an axial_step potential".into()));
    };
    let ex = config.example.as_ref().expect("example table checked by validate");
    let m = ex.m.unwrap_or(2);
    let spec = halfstrip_for_grid(l, c, m, config.domain.h)?;
    let cfg = halfstrip_config(config, &spec);
    let domain = cfg.domain.mask()?;
    let oracle = halfstrip_spectrum(&spec, m + 1)?;
    let form = assemble(&domain, &cfg.potential)?;
    let eigen = k_smallest(&form, m, cfg.tol)?;
    let eigenvalues: Vec<f64> = eigen.iter().map(|e| e.lambda).collect();
    let max_error = eigenvalues.iter().zip(&oracle.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let level = oracle.sigma - COUNT_OFFSET;
    let count = count_below(&form, level)?;
    let (sigma, _) = sigma_from_config(&domain, &cfg)?
        .ok_or_else(|| Error::InvalidConfig("halfstrip needs sigma.radii".into()))?;
    let k_max = ex.k_max.unwrap_or(m + 1);
    let mut energies = Vec::new();
    let mut tilde = 0;
    for k in 1..=k_max {
        let (_, e) = solve_partition(&domain, &cfg.potential, k, PNorm::INF, &cfg)?;
        if e.strong <= level && tilde == k - 1 {
            tilde = k;
        }
        energies.push(e.strong);
    }
    let counting = count_bounds(&form, level, &[(PNorm::INF, tilde)])?;
    let lambda_k = energies.get(cfg.k - 1).copied().unwrap_or(f64::NAN);
    let t = threshold(cfg.k, PNorm::INF, sigma.sigma, 0.0).with_energy(lambda_k, sigma.uncertainty + cfg.tol);
    let result = HalfStripResult {
        spec,
        m: oracle.m,
        lambda0: oracle.lambda0,
        oracle: oracle.eigenvalues[..m].to_vec(),
        sigma_oracle: oracle.sigma,
        eigenvalues,
        max_error,
        count,
        sigma_error: (sigma.sigma - oracle.sigma).abs(),
        sigma,
        partition_energies: energies,
        counting,
        threshold: t,
    };
    Ok((serde_json::to_value(&result)?, vec![Artifact::text("eigenvalues.csv", crate::io::eigen_csv(&eigen))]))
}

fn stripball(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let domain = config.domain.mask()?;
    let grid = domain.grid();
    let (lo, hi) = (grid.window_lo(0), grid.window_hi(0));
    let left = build_mask(&Region::rect(&[lo, 0.0], &[0.0, PI]), grid)?.intersection(&domain)?;
    let right = build_mask(&Region::rect(&[0.0, 0.0], &[hi, PI]), grid)?.intersection(&domain)?;
    let ball = build_mask(&Region::rect(&[lo, grid.window_lo(1)], &[hi, 0.0]), grid)?.intersection(&domain)?;
    let cells = vec![left, right, ball];
    let energy = energy_strong(&cells, &config.potential, config.p, config.tol)?;
    let form = assemble(&domain, &config.potential)?;
    let eigenvalues = k_smallest(&form, config.k, config.tol)?.into_iter().map(|e| e.lambda).collect();
    let (sigma, t) = construction_threshold(&domain, config, 3, energy.strong)?;
    let result = StripBallResult {
        ball_lambda: energy.lambdas[2],
        strip_lambdas: energy.lambdas[..2].to_vec(),
        sigma_oracle: 1.0,
        eigenvalues,
        sigma,
        threshold: t,
        energy,
    };
    Ok((serde_json::to_value(&result)?, vec![label_artifact(&domain, &cells)?]))
}

fn nopotential(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let domain = config.domain.mask()?;
    let level = config.ring.sigma.unwrap_or(0.0);
    let (rings, cells) = ring_result(&domain, config, level)?;
    let (sigma, t) = construction_threshold(&domain, config, config.k, rings.energy.strong)?;
    let artifact = label_artifact(&domain, &cells)?;
    Ok((serde_json::to_value(NoPotentialResult { rings, sigma, threshold: t })?, vec![artifact]))
}
