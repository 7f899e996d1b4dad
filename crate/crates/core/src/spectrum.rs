//! Bottom of the essential spectrum, threshold values and counting bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainMask;
use crate::operator::{assemble, count_below, smallest_eigenpair, DiscreteForm, Potential};
use crate::pnorm::{float_or_inf, opt_float_or_inf, PNorm};

/// Allowed decrease between consecutive sweep values.
pub const MONOTONE_TOL: f64 = 1e-8;

/// Default cap above which a rising sweep is read as `Sigma = inf`.
pub const DEFAULT_SIGMA_CAP: f64 = 1e3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub lambda: f64,
    pub monotone_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRow {
    pub r: f64,
    pub outer: f64,
    pub lambda: f64,
    /// Non-increasing in `outer` within [`MONOTONE_TOL`].
    pub monotone_ok: bool,
}

/// `lambda(Omega \ closure(B_r))` on the window, for increasing `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerssonSweep {
    pub rows: Vec<SweepRow>,
    #[serde(default)]
    pub annulus: Vec<AnnulusRow>,
    /// Set when a value drops by more than [`MONOTONE_TOL`].
    pub window_too_small: bool,
}

impl PerssonSweep {
    pub fn radii(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.r).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda).collect()
    }

    pub fn monotone(&self) -> bool {
        self.rows.iter().all(|r| r.monotone_ok) && self.annulus.iter().all(|r| r.monotone_ok)
    }

    /// CSV with columns `r,lambda,monotone_ok`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,lambda,monotone_ok\n");
        for row in &self.rows {
            s.push_str(&format!("{},{:.15e},{}\n", row.r, row.lambda, row.monotone_ok));
        }
        s
    }
}

fn check_increasing(radii: &[f64], what: &str) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::Precondition(format!("{what}: no radii given")));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] < 0.0 {
        return Err(Error::Precondition(format!("{what}: radii must be nonnegative and strictly increasing")));
    }
    Ok(())
}

/// Persson exhaustion: ground-state energy of the base mask outside growing balls about the origin.
pub fn persson_sweep(base: &DomainMask, v: &Potential, radii: &[f64], tol: f64) -> Result<PerssonSweep> {
    check_increasing(radii, "persson sweep")?;
    let lambdas = radii
        .par_iter()
        .map(|&r| {
            let m = base.minus_closed_ball(r);
            if m.is_empty() {
                return Err(Error::EmptyMask(format!("nothing of '{}' left outside radius {r}", base.label())));
            }
            Ok(smallest_eigenpair(&assemble(&m, v)?, tol)?.lambda)
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<SweepRow> = radii
        .iter()
        .zip(&lambdas)
        .enumerate()
        .map(|(i, (&r, &lambda))| SweepRow {
            r,
            lambda,
            monotone_ok: i == 0 || lambda >= lambdas[i - 1] - MONOTONE_TOL,
        })
        .collect();
    let window_too_small = rows.iter().any(|r| !r.monotone_ok);
    Ok(PerssonSweep { rows, annulus: Vec::new(), window_too_small })
}

/// `lambda(Omega ∩ A_{r,R})` for increasing outer radii `R`.
pub fn annulus_profile(base: &DomainMask, v: &Potential, r: f64, outers: &[f64], tol: f64) -> Result<Vec<AnnulusRow>> {
    check_increasing(outers, "annulus profile")?;
    if outers[0] <= r {
        return Err(Error::Precondition("outer radii must exceed the inner radius".into()));
    }
    let lambdas = outers
        .par_iter()
        .map(|&big| {
            let m = base.within_annulus(r, big);
            if m.is_empty() {
                return Err(Error::EmptyMask(format!("annulus ({r}, {big}) misses the domain")));
            }
            Ok(smallest_eigenpair(&assemble(&m, v)?, tol)?.lambda)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(outers
        .iter()
        .zip(&lambdas)
        .enumerate()
        .map(|(i, (&outer, &lambda))| AnnulusRow {
            r,
            outer,
            lambda,
            monotone_ok: i == 0 || lambda <= lambdas[i - 1] + MONOTONE_TOL,
        })
        .collect())
}

/// Estimate of `Sigma` from a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    /// Last sweep value, or `inf` in the compact-resolvent regime.
    #[serde(with = "float_or_inf")]
    pub sigma: f64,
    /// Two-point extrapolation of `lambda(r) = S - a/r` through the last two radii.
    #[serde(with = "float_or_inf")]
    pub extrapolated: f64,
    /// `|sigma - extrapolated|`.
    pub uncertainty: f64,
}

impl SigmaEstimate {
    pub fn exact(sigma: f64) -> Self {
        Self { sigma, extrapolated: sigma, uncertainty: 0.0 }
    }
}

pub fn sigma_estimate(sweep: &PerssonSweep, cap: f64) -> Result<SigmaEstimate> {
    let n = sweep.rows.len();
    if n < 3 {
        return Err(Error::InsufficientSweep(n));
    }
    let (a, b) = (&sweep.rows[n - 2], &sweep.rows[n - 1]);
    let slope = (b.lambda - a.lambda) / (b.r - a.r);
    if b.lambda > cap && slope > 0.0 {
        return Ok(SigmaEstimate { sigma: f64::INFINITY, extrapolated: f64::INFINITY, uncertainty: 0.0 });
    }
    let extrapolated = if a.r > 0.0 {
        (b.r * b.lambda - a.r * a.lambda) / (b.r - a.r)
    } else {
        b.lambda
    };
    Ok(SigmaEstimate { sigma: b.lambda, extrapolated, uncertainty: (b.lambda - extrapolated).abs() })
}

/// Threshold `T_{k,p}` and the strict threshold condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub k: usize,
    pub p: PNorm,
    #[serde(with = "float_or_inf")]
    pub sigma: f64,
    pub lambda_prev: f64,
    #[serde(with = "float_or_inf")]
    pub threshold: f64,
    pub lambda_k: Option<f64>,
    pub strict: bool,
    #[serde(with = "opt_float_or_inf")]
    pub margin: Option<f64>,
    /// Uncertainty of `sigma` used by `strict`.
    #[serde(default)]
    pub sigma_uncertainty: f64,
}

/// `T_{k,p} = (Lambda_{k-1,p}^p + Sigma^p)^(1/p)`, or `Sigma` for `p = inf`.
pub fn threshold_value(k: usize, p: PNorm, sigma: f64, lambda_prev: f64) -> f64 {
    let prev = if k <= 1 { 0.0 } else { lambda_prev };
    if p.is_inf() || sigma.is_infinite() {
        sigma
    } else {
        p.norm(&[prev, sigma])
    }
}

pub fn threshold(k: usize, p: PNorm, sigma: f64, lambda_prev: f64) -> ThresholdReport {
    let lambda_prev = if k <= 1 { 0.0 } else { lambda_prev };
    ThresholdReport {
        k,
        p,
        sigma,
        lambda_prev,
        threshold: threshold_value(k, p, sigma, lambda_prev),
        lambda_k: None,
        strict: false,
        margin: None,
        sigma_uncertainty: 0.0,
    }
}

impl ThresholdReport {
    /// Attaches `Lambda_{k,p}`; strict means `Lambda < T - uncertainty`.
    pub fn with_energy(mut self, lambda_k: f64, uncertainty: f64) -> Self {
        self.lambda_k = Some(lambda_k);
        self.sigma_uncertainty = uncertainty;
        self.margin = Some(self.threshold - lambda_k);
        self.strict = self.threshold.is_infinite() || lambda_k < self.threshold - uncertainty;
        self
    }

    /// `T_{k,p} <= k^(1/p) Sigma`.
    pub fn holder_bound_holds(&self) -> bool {
        self.threshold.is_infinite() || self.threshold <= self.p.holder_factor(self.k) * self.sigma * (1.0 + 1e-15)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountEntry {
    pub p: PNorm,
    pub count: usize,
}

/// Counting-function chain `Ñ_p(c) <= Ñ_inf(c) <= N(c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub c: f64,
    /// Eigenvalues `<= c` of the form.
    pub n: usize,
    pub partition_counts: Vec<CountEntry>,
    pub tilde_inf: Option<usize>,
    pub pass: bool,
}

pub fn count_bounds(form: &DiscreteForm, c: f64, partition_counts: &[(PNorm, usize)]) -> Result<CountReport> {
    let n = count_below(form, c)?;
    let tilde_inf = partition_counts.iter().find(|(p, _)| p.is_inf()).map(|&(_, k)| k);
    let pass = partition_counts.iter().all(|&(p, k)| k <= n && (p.is_inf() || tilde_inf.is_none_or(|t| k <= t)));
    Ok(CountReport {
        c,
        n,
        partition_counts: partition_counts.iter().map(|&(p, count)| CountEntry { p, count }).collect(),
        tilde_inf,
        pass,
    })
}
