use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::DomainMask;
use crate::io::{content_hash, eigen_csv, write_field_dump, write_label_pgm};
use crate::operator::{assemble, k_smallest, Eigenpair, Potential};
use crate::partition::{
    build_rings, energy_strong, ims_decompose, log_periodic_field, optimize, optimize_pinf, EnergyReport,
    IterationRecord, PartitionState, Seeding, StopReason,
};
use crate::pnorm::PNorm;
use crate::spectrum::{annulus_profile, persson_sweep, sigma_estimate, threshold, PerssonSweep, SigmaEstimate, ThresholdReport};

use super::config::{ImsField, Mode, ScenarioConfig};
use super::examples::run_example;

/// Self-contained record of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub mode: String,
    pub seed: u64,
    /// Git-style SHA-256 of the canonical JSON of `config`.
    pub input_hash: String,
    pub config: ScenarioConfig,
    pub result: Value,
}

/// A file produced next to the report.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(name: impl Into<String>, s: String) -> Self {
        Self { name: name.into(), bytes: s.into_bytes() }
    }
}

/// Report plus the files it refers to.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    /// Writes `report.json` and every artifact into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let path = dir.join("report.json");
        fs::write(&path, serde_json::to_string_pretty(&self.report)? + "\n")?;
        written.push(path);
        for a in &self.artifacts {
            let path = dir.join(&a.name);
            fs::write(&path, &a.bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Summary of an optimised partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub energy: EnergyReport,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
    pub origin: String,
    pub history: Vec<IterationRecord>,
}

impl PartitionSummary {
    pub fn from_state(state: &PartitionState, energy: EnergyReport) -> Self {
        Self {
            energy,
            iterations: state.iteration,
            converged: state.converged,
            stop: state.stop,
            origin: state.origin.clone(),
            history: state.history.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub partition: PartitionSummary,
    /// Lowest `k` eigenvalues of the whole domain.
    pub eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaEstimate>,
    /// `Lambda_{k-1,p}`, needed by the threshold for finite p.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_prev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<PerssonSweep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerssonResult {
    pub sweep: PerssonSweep,
    pub sigma: SigmaEstimate,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingResult {
    pub sigma: f64,
    pub eps: f64,
    pub radii: Vec<(f64, f64)>,
    pub annulus_lambdas: Vec<f64>,
    pub energy: EnergyReport,
    /// Every cell energy is at most `sigma + eps`.
    pub within_eps: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImsRow {
    pub n: f64,
    pub residual: f64,
    pub bound: f64,
    /// `residual(previous n) / residual(n)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImsResult {
    pub field: ImsField,
    pub rows: Vec<ImsRow>,
}

/// Optimises a k-partition, using p-continuation when `p = inf`.
pub fn solve_partition(
    domain: &DomainMask,
    v: &Potential,
    k: usize,
    p: PNorm,
    config: &ScenarioConfig,
) -> Result<(PartitionState, EnergyReport)> {
    let opts = config.optimize_options();
    if p.is_inf() {
        optimize_pinf(domain, v, k, &config.schedule, &Seeding::MultiStart, &opts)
    } else {
        optimize(domain, v, k, p, &Seeding::MultiStart, &opts)
    }
}

/// `Sigma` from the config: the exact value if given, else a Persson sweep.
pub fn sigma_from_config(domain: &DomainMask, config: &ScenarioConfig) -> Result<Option<(SigmaEstimate, Option<PerssonSweep>)>> {
    if let Some(s) = config.sigma.exact {
        return Ok(Some((SigmaEstimate::exact(s), None)));
    }
    if config.sigma.radii.is_empty() {
        return Ok(None);
    }
    let sweep = sweep_with_annulus(domain, config)?;
    Ok(Some((sigma_estimate(&sweep, config.sigma.cap)?, Some(sweep))))
}

fn sweep_with_annulus(domain: &DomainMask, config: &ScenarioConfig) -> Result<PerssonSweep> {
    let mut sweep = persson_sweep(domain, &config.potential, &config.sigma.radii, config.tol)?;
    if !config.sigma.annulus.is_empty() {
        let r = config.sigma.radii[0];
        sweep.annulus = annulus_profile(domain, &config.potential, r, &config.sigma.annulus, config.tol)?;
    }
    Ok(sweep)
}

/// Runs a scenario and returns the report and artifacts without touching the disk.
pub fn execute(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let (result, artifacts) = match config.mode {
        Mode::Solve => run_solve(config, false)?,
        Mode::Threshold => run_solve(config, true)?,
        Mode::Persson => run_persson(config)?,
        Mode::Ring => run_ring(config)?,
        Mode::Ims => run_ims(config)?,
        Mode::Example => run_example(config)?,
    };
    Ok(RunOutput { report: Report::new(config, config.mode.name(), result)?, artifacts })
}

/// Runs a scenario and writes its outputs to `config.out`, when set.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    let out = execute(config)?;
    if let Some(dir) = &config.out {
        out.write(dir)?;
    }
    Ok(out)
}

impl Report {
    /// Stamps `result` with the config echo and its content hash.
    pub fn new(config: &ScenarioConfig, mode: &str, result: Value) -> Result<Self> {
        let canonical = serde_json::to_vec(config)?;
        Ok(Self {
            scenario: config.label(),
            mode: mode.to_string(),
            seed: config.seed,
            input_hash: content_hash(&canonical),
            config: config.clone(),
            result,
        })
    }
}

/// Process exit status for an error: 3 for numerical failures, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Machine-readable error record.
pub fn error_json(e: &Error) -> Value {
    serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e) })
}

/// Field dumps, label image and eigenvalue table of a partition.
pub(crate) fn partition_artifacts(state: &PartitionState, eigen: &[Eigenpair]) -> Result<Vec<Artifact>> {
    let grid = state.domain.grid();
    let counts = grid.counts().to_vec();
    let mut out = Vec::new();
    for (i, u) in state.fields.iter().enumerate() {
        let mut bytes = Vec::new();
        write_field_dump(&mut bytes, &counts, u.values())?;
        out.push(Artifact { name: format!("cell_{}.spfd", i + 1), bytes });
    }
    if counts.len() == 2 {
        let mut bytes = Vec::new();
        write_label_pgm(&mut bytes, &counts, &state.labels())?;
        out.push(Artifact { name: "cells.pgm".into(), bytes });
    }
    if !eigen.is_empty() {
        out.push(Artifact::text("eigenvalues.csv", eigen_csv(eigen)));
    }
    Ok(out)
}

/// Partition, whole-domain eigenvalues and (when configured) the threshold comparison.
pub(crate) fn solve_with_threshold(
    domain: &DomainMask,
    config: &ScenarioConfig,
    require_sigma: bool,
) -> Result<(SolveResult, PartitionState, Vec<Eigenpair>)> {
    let (state, mut energy) = solve_partition(domain, &config.potential, config.k, config.p, config)?;
    let form = assemble(domain, &config.potential)?;
    let eigen = k_smallest(&form, config.k.min(form.n()), config.tol)?;
    let sigma = sigma_from_config(domain, config)?;
    if require_sigma && sigma.is_none() {
        return Err(Error::InvalidConfig("threshold mode needs sigma.exact or sigma.radii".into()));
    }
    let (mut lambda_prev, mut report, mut sweep, mut est) = (None, None, None, None);
    if let Some((s, sw)) = sigma {
        let prev = if config.k > 1 && !config.p.is_inf() {
            let (_, e) = solve_partition(domain, &config.potential, config.k - 1, config.p, config)?;
            e.strong
        } else {
            0.0
        };
        energy = energy.with_sigma(&s, prev);
        let t = threshold(config.k, config.p, s.sigma, prev).with_energy(energy.strong, s.uncertainty + config.tol);
        lambda_prev = Some(prev);
        report = Some(t);
        sweep = sw;
        est = Some(s);
    }
    let result = SolveResult {
        partition: PartitionSummary::from_state(&state, energy),
        eigenvalues: eigen.iter().map(|e| e.lambda).collect(),
        sigma: est,
        lambda_prev,
        threshold: report,
        sweep,
    };
    Ok((result, state, eigen))
}

fn run_solve(config: &ScenarioConfig, require_sigma: bool) -> Result<(Value, Vec<Artifact>)> {
    let domain = config.domain.mask()?;
    let (result, state, eigen) = solve_with_threshold(&domain, config, require_sigma)?;
    let mut artifacts = partition_artifacts(&state, &eigen)?;
    if let Some(sw) = &result.sweep {
        artifacts.push(Artifact::text("persson.csv", sw.to_csv()));
    }
    Ok((serde_json::to_value(&result)?, artifacts))
}

fn run_persson(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    if config.sigma.radii.len() < 3 {
        return Err(Error::InsufficientSweep(config.sigma.radii.len()));
    }
    let domain = config.domain.mask()?;
    let sweep = sweep_with_annulus(&domain, config)?;
    let sigma = sigma_estimate(&sweep, config.sigma.cap)?;
    let result = PerssonResult { monotone: sweep.monotone(), sigma, sweep };
    let csv = result.sweep.to_csv();
    Ok((serde_json::to_value(&result)?, vec![Artifact::text("persson.csv", csv)]))
}

pub(crate) fn ring_result(domain: &DomainMask, config: &ScenarioConfig, sigma: f64) -> Result<(RingResult, Vec<DomainMask>)> {
    let eps = config.ring.eps;
    let rings = build_rings(domain, &config.potential, config.k, eps, sigma, config.tol)?;
    let energy = energy_strong(&rings.cells, &config.potential, config.p, config.tol)?;
    let within_eps = energy.lambdas.iter().all(|&l| l <= sigma + eps + config.tol);
    Ok((
        RingResult { sigma, eps, radii: rings.radii, annulus_lambdas: rings.annulus_lambdas, energy, within_eps },
        rings.cells,
    ))
}

fn run_ring(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let domain = config.domain.mask()?;
    let sigma = match (config.ring.sigma, sigma_from_config(&domain, config)?) {
        (Some(s), _) => s,
        (None, Some((s, _))) => s.sigma,
        (None, None) => return Err(Error::InvalidConfig("ring mode needs ring.sigma, sigma.exact or sigma.radii".into())),
    };
    let (result, cells) = ring_result(&domain, config, sigma)?;
    let mut artifacts = Vec::new();
    let grid = domain.grid();
    if grid.dim() == 2 {
        let mut labels = vec![0u32; grid.len()];
        for (i, c) in cells.iter().enumerate() {
            for idx in c.indices() {
                labels[idx] = i as u32 + 1;
            }
        }
        let mut bytes = Vec::new();
        write_label_pgm(&mut bytes, grid.counts(), &labels)?;
        artifacts.push(Artifact { name: "cells.pgm".into(), bytes });
    }
    Ok((serde_json::to_value(&result)?, artifacts))
}

fn run_ims(config: &ScenarioConfig) -> Result<(Value, Vec<Artifact>)> {
    let domain = Arc::new(config.domain.mask()?);
    let form = assemble(&domain, &config.potential)?;
    let u = match config.ims.field {
        ImsField::Ground => k_smallest(&form, 1, config.tol)?.remove(0).vector,
        ImsField::LogPeriodic => log_periodic_field(domain.clone(), config.seed, config.ims.modes)?,
    };
    let mut rows: Vec<ImsRow> = Vec::new();
    for &n in &config.ims.n {
        let split = ims_decompose(&form, &u, n)?;
        let ratio = rows.last().map(|prev| prev.residual / split.residual);
        rows.push(ImsRow { n, residual: split.residual, bound: split.bound, ratio });
    }
    let mut csv = String::from("n,residual,bound,ratio\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{:.15e},{:.15e},{}\n",
            r.n,
            r.residual,
            r.bound,
            r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default()
        ));
    }
    let result = ImsResult { field: config.ims.field, rows };
    Ok((serde_json::to_value(&result)?, vec![Artifact::text("ims.csv", csv)]))
}
