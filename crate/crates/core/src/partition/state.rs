use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainMask;
use crate::operator::{smallest_eigenpair_from, DiscreteForm, Field};
use crate::pnorm::PNorm;

/// Admissibility diagnostics recorded after each accepted iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `Lambda_{k,p}` of the cells.
    pub energy: f64,
    pub lambdas: Vec<f64>,
    /// Largest `| ||u_i|| - 1 |`.
    pub norm_error: f64,
    /// Grid points where two fields are nonzero.
    pub overlaps: usize,
    /// Points that changed cell in this iteration.
    pub moved: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Not iterated yet.
    Initial,
    /// Reassignment reproduced the current cells.
    Fixed,
    /// Relative decrease below tolerance for the patience window.
    Stalled,
    /// The candidate step raised the energy and was discarded.
    Rejected,
    /// Nothing to optimise (`k = 1`).
    Trivial,
}

/// A k-tuple of normalised ground states with pairwise disjoint cells.
#[derive(Clone, Debug)]
pub struct PartitionState {
    pub k: usize,
    pub p: PNorm,
    pub domain: Arc<DomainMask>,
    pub potential: Arc<Vec<f64>>,
    pub cells: Vec<Arc<DomainMask>>,
    pub fields: Vec<Field>,
    pub lambdas: Vec<f64>,
    pub iteration: usize,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub stop: StopReason,
    /// Which start produced this state.
    pub origin: String,
}

/// Label vector: `0` = no cell, `i` = cell `i` (1-based).
pub type Labels = Vec<u32>;

pub(crate) fn cells_from_labels(domain: &DomainMask, labels: &[u32], k: usize) -> Vec<Arc<DomainMask>> {
    (1..=k as u32)
        .map(|i| {
            let ind = labels.iter().map(|&l| l == i).collect();
            Arc::new(
                DomainMask::from_indicator(domain.grid(), format!("cell{i}"), ind).expect("labels cover the grid"),
            )
        })
        .collect()
}

/// Ground states of every cell, solved concurrently.
pub(crate) fn ground_states(
    cells: &[Arc<DomainMask>],
    potential: &Arc<Vec<f64>>,
    tol: f64,
    guesses: Option<&[Field]>,
) -> Result<Vec<(f64, Field)>> {
    cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            if cell.is_empty() {
                return Err(Error::CellCollapse(i + 1));
            }
            let form = DiscreteForm::with_samples(cell.clone(), potential.clone())?;
            let pair = smallest_eigenpair_from(&form, tol, guesses.map(|g| &g[i]))?;
            Ok((pair.lambda, pair.vector))
        })
        .collect()
}

impl PartitionState {
    /// Builds a state from explicit cells by solving each ground state.
    pub fn from_cells(
        domain: Arc<DomainMask>,
        potential: Arc<Vec<f64>>,
        cells: Vec<Arc<DomainMask>>,
        p: PNorm,
        tol: f64,
    ) -> Result<Self> {
        for (i, c) in cells.iter().enumerate() {
            domain.check_grid(c)?;
            if !c.is_subset_of(&domain)? {
                return Err(Error::Precondition(format!("cell {} leaves the domain", i + 1)));
            }
        }
        check_disjoint(&cells)?;
        let gs = ground_states(&cells, &potential, tol, None)?;
        let (lambdas, fields) = gs.into_iter().unzip();
        let mut s = Self {
            k: cells.len(),
            p,
            domain,
            potential,
            cells,
            fields,
            lambdas,
            iteration: 0,
            history: Vec::new(),
            converged: false,
            stop: StopReason::Initial,
            origin: "cells".into(),
        };
        s.record(0);
        Ok(s)
    }

    /// `Lambda_{k,p}` of the current cells.
    pub fn energy(&self) -> f64 {
        self.p.norm(&self.lambdas)
    }

    pub fn equipartition_gap(&self) -> f64 {
        let max = self.lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn labels(&self) -> Labels {
        let mut l = vec![0u32; self.domain.grid().len()];
        for (i, c) in self.cells.iter().enumerate() {
            for idx in c.indices() {
                l[idx] = i as u32 + 1;
            }
        }
        l
    }

    /// Form of the whole domain with this state's potential.
    pub fn base_form(&self) -> Result<DiscreteForm> {
        DiscreteForm::with_samples(self.domain.clone(), self.potential.clone())
    }

    /// Points where more than one field is nonzero.
    pub fn overlaps(&self) -> usize {
        let n = self.domain.grid().len();
        (0..n)
            .filter(|&g| self.fields.iter().filter(|f| f.values()[g] != 0.0).count() > 1)
            .count()
    }

    pub fn norm_error(&self) -> f64 {
        self.fields.iter().map(|f| (f.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Checks disjoint supports, `supp u_i ⊆ ω_i ⊆ Ω` and unit norms.
    pub fn check_admissible(&self, norm_tol: f64) -> Result<()> {
        check_disjoint(&self.cells)?;
        if self.overlaps() > 0 {
            return Err(Error::Precondition("field supports overlap".into()));
        }
        for (i, (c, f)) in self.cells.iter().zip(&self.fields).enumerate() {
            if !c.is_subset_of(&self.domain)? {
                return Err(Error::Precondition(format!("cell {} leaves the domain", i + 1)));
            }
            if f.values().iter().zip(c.interior()).any(|(&v, &inside)| v != 0.0 && !inside) {
                return Err(Error::Precondition(format!("field {} leaves its cell", i + 1)));
            }
            if (f.norm() - 1.0).abs() > norm_tol {
                return Err(Error::Precondition(format!("field {} has norm {}", i + 1, f.norm())));
            }
        }
        Ok(())
    }

    pub(crate) fn record(&mut self, moved: usize) {
        let rec = IterationRecord {
            iteration: self.iteration,
            energy: self.energy(),
            lambdas: self.lambdas.clone(),
            norm_error: self.norm_error(),
            overlaps: self.overlaps(),
            moved,
        };
        self.history.push(rec);
    }
}

/// Fails with the first overlapping pair of cells.
pub fn check_disjoint(cells: &[Arc<DomainMask>]) -> Result<()> {
    if cells.is_empty() {
        return Ok(());
    }
    let n = cells[0].grid().len();
    let mut owner = vec![0usize; n];
    for (i, c) in cells.iter().enumerate() {
        cells[0].check_grid(c)?;
        for idx in c.indices() {
            if owner[idx] != 0 {
                return Err(Error::OverlappingCells(owner[idx], i + 1));
            }
            owner[idx] = i + 1;
        }
    }
    Ok(())
}
