use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_mask, DomainMask, GridSpec, Region};
use crate::operator::Potential;
use crate::partition::{OptimizeOptions, DEFAULT_P_SCHEDULE};
use crate::pnorm::{opt_float_or_inf, PNorm};
use crate::spectrum::DEFAULT_SIGMA_CAP;

/// What a scenario computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Threshold,
    Persson,
    Ring,
    Ims,
    Example,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Threshold => "threshold",
            Mode::Persson => "persson",
            Mode::Ring => "ring",
            Mode::Ims => "ims",
            Mode::Example => "example",
        }
    }
}

/// Region, truncation window and lattice spacing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub region: Region,
    /// Window corners.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub h: f64,
    /// Extend `hi` outward to the next lattice point instead of requiring `h` to divide the window.
    #[serde(default)]
    pub snap: bool,
}

impl DomainConfig {
    pub fn grid(&self) -> Result<Arc<GridSpec>> {
        if !self.snap {
            return Ok(Arc::new(GridSpec::new(&self.lo, &self.hi, self.h)?));
        }
        if self.lo.len() != self.hi.len() {
            return Err(Error::InvalidGrid("lo and hi have different lengths".into()));
        }
        let counts: Vec<usize> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &u)| ((u - l) / self.h - 1e-9).ceil().max(0.0) as usize + 1)
            .collect();
        Ok(Arc::new(GridSpec::from_counts(&self.lo, self.h, &counts)?))
    }

    pub fn mask(&self) -> Result<DomainMask> {
        build_mask(&self.region, &self.grid()?)
    }
}

/// How `Sigma` is obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaConfig {
    /// Known value (`"inf"` allowed); skips the sweep.
    #[serde(with = "opt_float_or_inf", skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    /// Persson radii, at least three.
    pub radii: Vec<f64>,
    /// Sweep values above `cap` that still increase signal compact resolvent.
    pub cap: f64,
    /// Outer radii of the annulus profile reported next to the sweep.
    pub annulus: Vec<f64>,
}

impl Default for SigmaConfig {
    fn default() -> Self {
        Self { exact: None, radii: Vec::new(), cap: DEFAULT_SIGMA_CAP, annulus: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RingConfig {
    pub eps: f64,
    /// Level the annuli are built against; defaults to the `Sigma` of `[sigma]`.
    #[serde(with = "opt_float_or_inf", skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl Default for RingConfig {
    fn default() -> Self {
        Self { eps: 0.1, sigma: None }
    }
}

/// Test field for the localisation check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImsField {
    /// Ground state of the domain.
    Ground,
    /// Log-periodic random field seeded from the scenario seed.
    LogPeriodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImsConfig {
    /// Cutoff scales; consecutive ratios are reported.
    pub n: Vec<f64>,
    pub field: ImsField,
    pub modes: usize,
}

impl Default for ImsConfig {
    fn default() -> Self {
        Self { n: vec![2.0, 4.0], field: ImsField::LogPeriodic, modes: 3 }
    }
}

/// Parameters of the named examples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleConfig {
    pub name: String,
    /// Sweep values (window lengths for `strip`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    /// Room index checked against the strip room formula.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room_j: Option<u32>,
    /// Number of bound states below `Sigma` (`halfstrip`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Largest k tried when counting partitions below a level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
}

impl ExampleConfig {
    pub fn named(name: &str) -> Self {
        Self { name: name.into(), values: Vec::new(), room_j: None, m: None, k_max: None }
    }
}

fn default_k() -> usize {
    2
}

fn default_p() -> PNorm {
    PNorm::INF
}

fn default_tol() -> f64 {
    1e-10
}

fn default_schedule() -> Vec<f64> {
    DEFAULT_P_SCHEDULE.to_vec()
}

/// A complete scenario; every field except `mode` and `domain` has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub mode: Mode,
    pub domain: DomainConfig,
    #[serde(default)]
    pub potential: Potential,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_p")]
    pub p: PNorm,
    #[serde(default)]
    pub seed: u64,
    /// Eigensolver tolerance; overrides `optimizer.tol`.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// p-continuation used when `p = inf`.
    #[serde(default = "default_schedule")]
    pub schedule: Vec<f64>,
    #[serde(default)]
    pub optimizer: OptimizeOptions,
    #[serde(default)]
    pub sigma: SigmaConfig,
    #[serde(default)]
    pub ring: RingConfig,
    #[serde(default)]
    pub ims: ImsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

const SAMPLES: [(&str, &str); 7] = [
    ("square", include_str!("../../scenarios/square.toml")),
    ("strip", include_str!("../../scenarios/strip.toml")),
    ("watermelon", include_str!("../../scenarios/watermelon.toml")),
    ("halfstrip", include_str!("../../scenarios/halfstrip.toml")),
    ("stripball", include_str!("../../scenarios/stripball.toml")),
    ("nopotential", include_str!("../../scenarios/nopotential.toml")),
    ("harmonic", include_str!("../../scenarios/harmonic.toml")),
];

impl ScenarioConfig {
    /// Names of the shipped scenarios.
    pub fn names() -> Vec<&'static str> {
        SAMPLES.iter().map(|(n, _)| *n).collect()
    }

    /// The annotated sample shipped for `name`.
    pub fn sample(name: &str) -> Result<&'static str> {
        SAMPLES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| *s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scenario '{name}'; known: {}", Self::names().join(", "))))
    }

    pub fn named(name: &str) -> Result<Self> {
        Self::from_toml(Self::sample(name)?)
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        let grid = self.domain.grid()?;
        self.domain.region.validate(grid.dim())?;
        self.potential.validate(&grid)?;
        if self.p.is_inf() && (self.schedule.is_empty() || self.schedule.windows(2).any(|w| !(w[1] > w[0]))) {
            return Err(Error::InvalidConfig("schedule must be nonempty and increasing".into()));
        }
        if self.mode == Mode::Example && self.example.is_none() {
            return Err(Error::InvalidConfig("mode 'example' needs an [example] table".into()));
        }
        Ok(())
    }

    /// Optimizer settings with the scenario seed and tolerance applied.
    pub fn optimize_options(&self) -> OptimizeOptions {
        OptimizeOptions { tol: self.tol, seed: self.seed, ..self.optimizer.clone() }
    }

    pub fn label(&self) -> String {
        if self.name.is_empty() {
            self.mode.name().to_string()
        } else {
            self.name.clone()
        }
    }
}
