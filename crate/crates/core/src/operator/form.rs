use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainMask, GridSpec};

use super::envelope::Envelope;
use super::field::Field;
use super::potential::Potential;

const NO_DOF: usize = usize::MAX;

/// The discrete Dirichlet form `-Δ_h + V` on the interior points of a mask.
///
/// Unknowns are numbered with the shorter grid axis varying fastest, which
/// keeps the matrix envelope narrow.
#[derive(Clone, Debug)]
pub struct DiscreteForm {
    mask: Arc<DomainMask>,
    potential: Arc<Vec<f64>>,
    dofs: Vec<usize>,
    dof_of: Vec<usize>,
    inv_h2: f64,
}

/// Assembles the form on `mask` with potential `v`.
pub fn assemble(mask: &DomainMask, v: &Potential) -> Result<DiscreteForm> {
    let samples = v.sample(mask.grid())?;
    DiscreteForm::with_samples(Arc::new(mask.clone()), Arc::new(samples))
}

impl DiscreteForm {
    /// Assembles from nodal potential samples that are already validated.
    pub fn with_samples(mask: Arc<DomainMask>, potential: Arc<Vec<f64>>) -> Result<Self> {
        let grid = mask.grid().clone();
        if potential.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if mask.is_empty() {
            return Err(Error::EmptyMask(format!("cannot assemble on empty mask '{}'", mask.label())));
        }
        let dofs = ordering(&grid, &mask);
        let mut dof_of = vec![NO_DOF; grid.len()];
        for (k, &g) in dofs.iter().enumerate() {
            dof_of[g] = k;
        }
        let h = grid.h();
        Ok(Self { mask, potential, dofs, dof_of, inv_h2: 1.0 / (h * h) })
    }

    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        self.mask.grid()
    }

    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.dofs.len()
    }

    /// Grid index of each unknown.
    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn potential_samples(&self) -> &Arc<Vec<f64>> {
        &self.potential
    }

    fn diag(&self, g: usize) -> f64 {
        2.0 * self.grid().dim() as f64 * self.inv_h2 + self.potential[g]
    }

    /// `y = A x` on unknown vectors (no quadrature weight).
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let grid = self.grid();
        for (k, &g) in self.dofs.iter().enumerate() {
            let mut s = self.diag(g) * x[k];
            grid.for_each_neighbor(g, |j| {
                let dj = self.dof_of[j];
                if dj != NO_DOF {
                    s -= self.inv_h2 * x[dj];
                }
            });
            y[k] = s;
        }
    }

    /// Infinity norm of the matrix.
    pub fn norm_inf(&self) -> f64 {
        let off = 2.0 * self.grid().dim() as f64 * self.inv_h2;
        self.dofs.iter().map(|&g| self.diag(g) + off).fold(0.0, f64::max)
    }

    /// Smallest potential sample on the mask; a lower bound for the spectrum.
    pub fn min_potential(&self) -> f64 {
        self.dofs.iter().map(|&g| self.potential[g]).fold(f64::INFINITY, f64::min)
    }

    /// Restriction of a field to the unknowns; fails if it has mass off the mask.
    pub fn restrict(&self, u: &Field) -> Result<Vec<f64>> {
        if !u.grid().same_lattice(self.grid()) {
            return Err(Error::GridMismatch);
        }
        let vals = u.values();
        if vals.iter().enumerate().any(|(g, &v)| v != 0.0 && self.dof_of[g] == NO_DOF) {
            return Err(Error::Precondition("field support is not contained in the form's mask".into()));
        }
        Ok(self.dofs.iter().map(|&g| vals[g]).collect())
    }

    /// Lifts an unknown vector to a field on the form's mask.
    pub fn extend(&self, x: &[f64]) -> Field {
        let mut values = vec![0.0; self.grid().len()];
        for (k, &g) in self.dofs.iter().enumerate() {
            values[g] = x[k];
        }
        Field::new(self.mask.clone(), values).expect("lengths agree by construction")
    }

    /// `a_V(u)`: quadrature-weighted `Σ|∇_h u|^2 + Σ V u^2`.
    pub fn form_energy(&self, u: &Field) -> Result<f64> {
        let x = self.restrict(u)?;
        let mut y = vec![0.0; x.len()];
        self.apply(&x, &mut y);
        let s: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        Ok(s * self.grid().cell_volume())
    }

    /// Rayleigh quotient `a_V(u) / ||u||^2`.
    pub fn rayleigh(&self, u: &Field) -> Result<f64> {
        let x = self.restrict(u)?;
        let nn: f64 = x.iter().map(|v| v * v).sum();
        if !(nn > 0.0) {
            return Err(Error::ZeroField);
        }
        let mut y = vec![0.0; x.len()];
        self.apply(&x, &mut y);
        let s: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        Ok(s / nn)
    }

    /// Envelope storage of `A - shift I` (unfactored).
    pub fn shifted_envelope(&self, shift: f64) -> Envelope {
        let grid = self.grid();
        let n = self.n();
        let mut first = Vec::with_capacity(n);
        let mut lower: Vec<Vec<usize>> = Vec::with_capacity(n);
        for (k, &g) in self.dofs.iter().enumerate() {
            let mut cols = Vec::with_capacity(4);
            grid.for_each_neighbor(g, |j| {
                let dj = self.dof_of[j];
                if dj != NO_DOF && dj < k {
                    cols.push(dj);
                }
            });
            first.push(cols.iter().copied().min().unwrap_or(k));
            lower.push(cols);
        }
        let diag: Vec<f64> = self.dofs.iter().map(|&g| self.diag(g) - shift).collect();
        let mut env = Envelope::with_profile(first, diag);
        for (k, cols) in lower.iter().enumerate() {
            for &j in cols {
                env.set(k, j, -self.inv_h2);
            }
        }
        env
    }

    /// Dense matrix, for small problems and tests.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut a = vec![vec![0.0; n]; n];
        let mut e = vec![0.0; n];
        let mut y = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut y);
            for i in 0..n {
                a[i][j] = y[i];
            }
            e[j] = 0.0;
        }
        a
    }
}

/// Unknown numbering: grid traversal with the shortest axis innermost.
fn ordering(grid: &GridSpec, mask: &DomainMask) -> Vec<usize> {
    if grid.dim() == 2 && grid.counts()[0] < grid.counts()[1] {
        let (n0, n1) = (grid.counts()[0], grid.counts()[1]);
        let mut out = Vec::with_capacity(mask.count());
        for i1 in 0..n1 {
            for i0 in 0..n0 {
                let g = i0 * n1 + i1;
                if mask.contains(g) {
                    out.push(g);
                }
            }
        }
        out
    } else {
        mask.indices()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn interval_stencil_is_tridiagonal() {
        let g = Arc::new(GridSpec::new(&[0.0], &[PI], PI / 4.0).unwrap());
        let f = assemble(&DomainMask::full(&g), &Potential::Zero).unwrap();
        let a = f.dense();
        let s = 16.0 / (PI * PI);
        let expect = [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[i][j] - expect[i][j] * s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_mask_rejected() {
        let g = Arc::new(GridSpec::new(&[0.0], &[1.0], 0.25).unwrap());
        assert!(matches!(assemble(&DomainMask::empty(&g), &Potential::Zero), Err(Error::EmptyMask(_))));
    }

    #[test]
    fn rayleigh_of_sine_mode() {
        let g = Arc::new(GridSpec::new(&[0.0], &[PI], PI / 256.0).unwrap());
        let m = Arc::new(DomainMask::full(&g));
        let f = assemble(&m, &Potential::Zero).unwrap();
        let u = Field::from_fn(m, |x| x[0].sin());
        let r = f.rayleigh(&u).unwrap();
        assert!((r - 1.0).abs() < 1e-3);
        assert!((f.rayleigh(&u.scaled(2.0)).unwrap() - r).abs() < 1e-14);
    }
}
