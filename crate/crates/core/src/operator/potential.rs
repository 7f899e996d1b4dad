use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridSpec;

/// Sub-samples per axis used to average radial steps over a dual cell.
const RADIAL_SUBSAMPLES: usize = 8;

/// A nonnegative potential `V` on the grid window.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential {
    #[default]
    Zero,
    /// `0` for `x_0 <= L`, `c` for `x_0 > L`.
    AxialStep {
        #[serde(rename = "L", alias = "l")]
        l: f64,
        c: f64,
    },
    /// `0` inside the ball of radius `r` about the origin, `c` outside.
    RadialStep { r: f64, c: f64 },
    /// `|x|^2`.
    Harmonic,
    /// One value per grid point (row-major, full window).
    Tabulated { values: Vec<f64> },
}

impl Potential {
    pub fn axial_step(l: f64, c: f64) -> Self {
        Potential::AxialStep { l, c }
    }

    pub fn radial_step(r: f64, c: f64) -> Self {
        Potential::RadialStep { r, c }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        match self {
            Potential::Zero | Potential::Harmonic => Ok(()),
            Potential::AxialStep { l, c } => {
                if !(*l > 0.0 && *c > 0.0) {
                    return Err(Error::InvalidPotential(format!("axial_step needs L > 0, c > 0 (L = {l}, c = {c})")));
                }
                Ok(())
            }
            Potential::RadialStep { r, c } => {
                if !(*r > 0.0 && *c > 0.0) {
                    return Err(Error::InvalidPotential(format!("radial_step needs r > 0, c > 0 (r = {r}, c = {c})")));
                }
                Ok(())
            }
            Potential::Tabulated { values } => {
                if values.len() != grid.len() {
                    return Err(Error::InvalidPotential(format!(
                        "{} tabulated values for {} grid points",
                        values.len(),
                        grid.len()
                    )));
                }
                if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidPotential(format!("V[{i}] = {v} is not a finite nonnegative value")));
                }
                Ok(())
            }
        }
    }

    /// Pointwise value at `x`.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::AxialStep { l, c } => {
                if x[0] > *l {
                    *c
                } else {
                    0.0
                }
            }
            Potential::RadialStep { r, c } => {
                if x.iter().map(|v| v * v).sum::<f64>() < r * r {
                    0.0
                } else {
                    *c
                }
            }
            Potential::Harmonic => x.iter().map(|v| v * v).sum(),
            Potential::Tabulated { .. } => f64::NAN,
        }
    }

    /// Nodal samples used by the stencil, one per grid point.
    ///
    /// Step potentials are averaged over the dual cell `x + [-h/2, h/2]^d`
    /// so the jump location is resolved below the grid spacing.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        self.validate(grid)?;
        let d = grid.dim();
        let h = grid.h();
        let out = match self {
            Potential::Tabulated { values } => values.clone(),
            Potential::AxialStep { l, c } => (0..grid.len())
                .map(|idx| {
                    let x = grid.coord(idx)[0];
                    c * ((x + 0.5 * h - l) / h).clamp(0.0, 1.0)
                })
                .collect(),
            Potential::RadialStep { r, c } => (0..grid.len())
                .map(|idx| {
                    let x = grid.coord(idx);
                    let s = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
                    let reach = 0.5 * h * (d as f64).sqrt();
                    if s + reach < *r {
                        0.0
                    } else if s - reach > *r {
                        *c
                    } else {
                        c * outside_fraction(&x[..d], h, *r)
                    }
                })
                .collect(),
            _ => (0..grid.len()).map(|idx| self.value_at(&grid.coord(idx)[..d])).collect(),
        };
        Ok(out)
    }
}

/// Fraction of midpoint sub-samples of the dual cell around `x` with `|y| >= r`.
fn outside_fraction(x: &[f64], h: f64, r: f64) -> f64 {
    let m = RADIAL_SUBSAMPLES;
    let off = |i: usize| -0.5 * h + (i as f64 + 0.5) * h / m as f64;
    let mut hits = 0usize;
    let total;
    if x.len() == 1 {
        total = m;
        for i in 0..m {
            if (x[0] + off(i)).abs() >= r {
                hits += 1;
            }
        }
    } else {
        total = m * m;
        for i in 0..m {
            for j in 0..m {
                let a = x[0] + off(i);
                let b = x[1] + off(j);
                if a * a + b * b >= r * r {
                    hits += 1;
                }
            }
        }
    }
    hits as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_tabulated_entry() {
        let g = GridSpec::from_counts(&[0.0], 1.0, &[4]).unwrap();
        let v = Potential::Tabulated { values: vec![0.0, 1.0, -1.0, 0.0] };
        assert!(matches!(v.validate(&g), Err(Error::InvalidPotential(_))));
    }

    #[test]
    fn axial_step_is_half_at_jump_node() {
        let g = GridSpec::new(&[0.0], &[2.0], 0.5).unwrap();
        let s = Potential::axial_step(1.0, 4.0).sample(&g).unwrap();
        assert_eq!(s, vec![0.0, 0.0, 2.0, 4.0, 4.0]);
    }

    #[test]
    fn serde_names() {
        let v: Potential = serde_json::from_str(r#"{"type":"axial_step","L":1.0,"c":5.0}"#).unwrap();
        assert_eq!(v, Potential::axial_step(1.0, 5.0));
        let v: Potential = serde_json::from_str(r#"{"type":"harmonic"}"#).unwrap();
        assert_eq!(v, Potential::Harmonic);
    }
}
