use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainMask, GridSpec};

/// A grid function supported on a mask; values outside the mask are zero.
///
/// Values are stored over the full window so fields on different masks of the
/// same grid combine without re-indexing.
#[derive(Clone, Debug)]
pub struct Field {
    mask: Arc<DomainMask>,
    values: Vec<f64>,
}

impl Field {
    /// Field from full-window values; entries outside the mask are zeroed.
    pub fn new(mask: Arc<DomainMask>, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != mask.grid().len() {
            return Err(Error::GridMismatch);
        }
        for (v, &inside) in values.iter_mut().zip(mask.interior()) {
            if !inside {
                *v = 0.0;
            }
        }
        Ok(Self { mask, values })
    }

    pub fn zeros(mask: Arc<DomainMask>) -> Self {
        let n = mask.grid().len();
        Self { mask, values: vec![0.0; n] }
    }

    /// Samples `f` at interior points.
    pub fn from_fn(mask: Arc<DomainMask>, f: impl Fn(&[f64]) -> f64) -> Self {
        let g = mask.grid().clone();
        let d = g.dim();
        let values = (0..g.len())
            .map(|i| if mask.contains(i) { f(&g.coord(i)[..d]) } else { 0.0 })
            .collect();
        Self { mask, values }
    }

    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        self.mask.grid()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `<u, v>` with quadrature weight `h^d`.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        if !self.grid().same_lattice(other.grid()) {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.grid().cell_volume())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid().cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut f = self.clone();
        f.scale(a);
        f
    }

    /// Rescales to unit L2 norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroField);
        }
        self.scale(1.0 / n);
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Grid points where the field is nonzero.
    pub fn support(&self) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(i, _)| i).collect()
    }

    /// Same values, reinterpreted on a larger mask.
    pub fn on_mask(&self, mask: Arc<DomainMask>) -> Result<Field> {
        if !mask.grid().same_lattice(self.grid()) {
            return Err(Error::GridMismatch);
        }
        if self.values.iter().zip(mask.interior()).any(|(&v, &inside)| v != 0.0 && !inside) {
            return Err(Error::Precondition("field support leaves the target mask".into()));
        }
        Ok(Field { mask, values: self.values.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn normalization_uses_cell_volume() {
        let g = Arc::new(GridSpec::new(&[0.0], &[PI], PI / 64.0).unwrap());
        let m = Arc::new(DomainMask::full(&g));
        let mut u = Field::from_fn(m, |x| x[0].sin());
        assert!((u.norm_sq() - PI / 2.0).abs() < 1e-10);
        u.normalize().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_cannot_be_normalized() {
        let g = Arc::new(GridSpec::new(&[0.0], &[1.0], 0.25).unwrap());
        let mut u = Field::zeros(Arc::new(DomainMask::full(&g)));
        assert!(matches!(u.normalize(), Err(Error::ZeroField)));
    }
}
