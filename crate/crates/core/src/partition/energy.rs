use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainMask;
use crate::operator::{assemble, smallest_eigenpair, Potential};
use crate::pnorm::PNorm;
use crate::spectrum::{threshold, SigmaEstimate, ThresholdReport};

use super::state::{check_disjoint, PartitionState};

/// Energies and diagnostics of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub k: usize,
    pub p: PNorm,
    /// `lambda(ω_i)` per cell.
    pub lambdas: Vec<f64>,
    /// `R_V(u_i)` on the base domain form; empty when no fields are available.
    pub rayleigh: Vec<f64>,
    /// `Lambda_{k,p}`.
    pub strong: f64,
    /// `L_{k,p}`; equals `strong` when fields are cell ground states.
    pub relaxed: f64,
    pub equipartition_gap: f64,
    /// Fraction of domain points that belong to some cell; unknown for explicit cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
    pub threshold: Option<ThresholdReport>,
    /// `lambda(ω_i) < Sigma` per cell, once a Sigma estimate is attached.
    pub ground_state: Vec<bool>,
}

impl EnergyReport {
    fn new(k: usize, p: PNorm, lambdas: Vec<f64>, rayleigh: Vec<f64>, coverage: Option<f64>) -> Self {
        let strong = p.norm(&lambdas);
        let relaxed = if rayleigh.is_empty() { strong } else { p.norm(&rayleigh) };
        let max = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
        Self {
            k,
            p,
            lambdas,
            rayleigh,
            strong,
            relaxed,
            equipartition_gap: max - min,
            coverage,
            threshold: None,
            ground_state: Vec::new(),
        }
    }

    /// Report for a state, evaluating Rayleigh quotients on the base form.
    pub fn from_state(state: &PartitionState) -> Result<Self> {
        let rayleigh = rayleigh_quotients(state)?;
        let covered: usize = state.cells.iter().map(|c| c.count()).sum();
        Ok(Self::new(
            state.k,
            state.p,
            state.lambdas.clone(),
            rayleigh,
            Some(covered as f64 / state.domain.count() as f64),
        ))
    }

    /// Same cells evaluated with another exponent.
    pub fn with_p(&self, p: PNorm) -> Self {
        let mut r = Self::new(self.k, p, self.lambdas.clone(), self.rayleigh.clone(), self.coverage);
        r.threshold = self.threshold.clone();
        r.ground_state = self.ground_state.clone();
        r
    }

    /// Attaches the threshold comparison and ground-state flags.
    pub fn with_sigma(mut self, sigma: &SigmaEstimate, lambda_prev: f64) -> Self {
        let t = threshold(self.k, self.p, sigma.sigma, lambda_prev).with_energy(self.strong, sigma.uncertainty);
        self.ground_state = self.lambdas.iter().map(|&l| l < sigma.sigma).collect();
        self.threshold = Some(t);
        self
    }
}

/// `Lambda_{k,p}` of explicit cells.
pub fn energy_strong(cells: &[DomainMask], v: &Potential, p: PNorm, tol: f64) -> Result<EnergyReport> {
    if cells.is_empty() {
        return Err(Error::Precondition("no cells given".into()));
    }
    for (i, c) in cells.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::EmptyMask(format!("cell {} is empty", i + 1)));
        }
    }
    let arcs: Vec<Arc<DomainMask>> = cells.iter().cloned().map(Arc::new).collect();
    check_disjoint(&arcs)?;
    let lambdas = cells
        .par_iter()
        .map(|c| Ok(smallest_eigenpair(&assemble(c, v)?, tol)?.lambda))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EnergyReport::new(cells.len(), p, lambdas, Vec::new(), None))
}

fn rayleigh_quotients(state: &PartitionState) -> Result<Vec<f64>> {
    let form = state.base_form()?;
    state.fields.iter().map(|u| form.rayleigh(u)).collect()
}

/// `L_{k,p}`: p-norm of the Rayleigh quotients over the base domain form.
pub fn energy_relaxed(state: &PartitionState) -> Result<f64> {
    Ok(state.p.norm(&rayleigh_quotients(state)?))
}
