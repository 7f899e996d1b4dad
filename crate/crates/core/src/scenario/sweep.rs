use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pnorm::PNorm;
use crate::spectrum::{ThresholdReport, MONOTONE_TOL};

use super::config::ScenarioConfig;
use super::run::solve_with_threshold;

/// Combined optimizer and solver tolerance for monotonicity in `p` and `k`.
pub const SWEEP_TOL: f64 = 1e-2;

/// Parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Upper window bound along the first axis.
    Window,
    P,
    K,
    H,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "window" | "r" => Ok(SweepAxis::Window),
            "p" => Ok(SweepAxis::P),
            "k" => Ok(SweepAxis::K),
            "h" => Ok(SweepAxis::H),
            _ => Err(Error::InvalidConfig(format!("unknown sweep axis '{s}' (window, p, k, h)"))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SweepAxis::Window => "window",
            SweepAxis::P => "p",
            SweepAxis::K => "k",
            SweepAxis::H => "h",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(with = "crate::pnorm::float_or_inf")]
    pub value: f64,
    pub energy: Option<f64>,
    pub lambdas: Vec<f64>,
    pub gap: Option<f64>,
    pub threshold: Option<ThresholdReport>,
    /// Monotonicity against the previous successful row, as expected for the axis.
    pub monotone_ok: Option<bool>,
    /// Ratio of consecutive energy differences (`h` sweeps).
    pub ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRecord>,
}

impl SweepTable {
    pub fn energies(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    /// True when every row succeeded and passed its monotonicity check.
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_none() && r.monotone_ok != Some(false))
    }

    /// CSV with columns `value,energy,gap,monotone_ok,ratio,error`.
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.12e}")).unwrap_or_default();
        let mut s = String::from("value,energy,gap,monotone_ok,ratio,error\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.value,
                opt(r.energy),
                opt(r.gap),
                r.monotone_ok.map(|b| b.to_string()).unwrap_or_default(),
                opt(r.ratio),
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            ));
        }
        s
    }
}

/// Applies one sweep value to a copy of the configuration.
pub fn apply_axis(config: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<ScenarioConfig> {
    let mut c = config.clone();
    match axis {
        SweepAxis::Window => {
            if c.domain.hi.is_empty() {
                return Err(Error::InvalidConfig("window sweep needs a window".into()));
            }
            c.domain.hi[0] = value;
        }
        SweepAxis::P => c.p = if value.is_infinite() { PNorm::INF } else { PNorm::new(value)? },
        SweepAxis::K => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(Error::InvalidConfig(format!("k must be a positive integer, got {value}")));
            }
            c.k = value as usize;
        }
        SweepAxis::H => c.domain.h = value,
    }
    c.validate()?;
    Ok(c)
}

/// One partition solve per value; failures are recorded per row and the sweep continues.
pub fn sweep(config: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepTable> {
    sweep_with(config, axis, values, |_, _| {})
}

/// As [`sweep`], with a hook that adjusts each row's configuration after the axis value is applied.
pub fn sweep_with(
    config: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    adjust: impl Fn(&mut ScenarioConfig, f64) + Sync,
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one value".into()));
    }
    let mut rows: Vec<SweepRecord> = values
        .par_iter()
        .map(|&value| {
            let solved = apply_axis(config, axis, value).and_then(|mut c| {
                adjust(&mut c, value);
                let domain = c.domain.mask()?;
                solve_with_threshold(&domain, &c, false).map(|(r, _, _)| r)
            });
            match solved {
                Ok(r) => {
                    let e = &r.partition.energy;
                    SweepRecord {
                        value,
                        energy: Some(e.strong),
                        lambdas: e.lambdas.clone(),
                        gap: Some(e.equipartition_gap),
                        threshold: r.threshold,
                        monotone_ok: None,
                        ratio: None,
                        error: None,
                    }
                }
                Err(err) => SweepRecord {
                    value,
                    energy: None,
                    lambdas: Vec::new(),
                    gap: None,
                    threshold: None,
                    monotone_ok: None,
                    ratio: None,
                    error: Some(format!("{}: {err}", err.kind())),
                },
            }
        })
        .collect();
    mark_monotone(axis, &mut rows);
    Ok(SweepTable { axis, rows })
}

fn mark_monotone(axis: SweepAxis, rows: &mut [SweepRecord]) {
    let mut prev: Option<f64> = None;
    let mut prev_diff: Option<f64> = None;
    for row in rows.iter_mut() {
        let Some(e) = row.energy else { continue };
        if let Some(q) = prev {
            row.monotone_ok = Some(match axis {
                SweepAxis::Window => e <= q + MONOTONE_TOL,
                SweepAxis::P => e <= q + SWEEP_TOL,
                SweepAxis::K => e >= q - SWEEP_TOL,
                SweepAxis::H => prev_diff.is_none_or(|d| (e - q).abs() <= d.abs()),
            });
            if axis == SweepAxis::H {
                let d = e - q;
                row.ratio = prev_diff.map(|pd| pd / d);
                prev_diff = Some(d);
            }
        }
        prev = Some(e);
    }
}
