use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{DiscreteForm, Field};

use super::state::PartitionState;

/// Optimality residuals of one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResidual {
    pub cell: usize,
    /// `a_i` with `a_i² = R_V(u_i)^(p-1) / L^(p-1)`.
    pub weight: f64,
    /// Discrete Rayleigh quotient of `u_i`.
    pub rayleigh: f64,
    /// Rayleigh quotient of the multilinear interpolant of `u_i`.
    pub rayleigh_interpolant: f64,
    /// Mass of `(A v_i - R v_i)^+` with the discrete quotient.
    pub r1_discrete: f64,
    /// Mass of the negative part of inequality (2) with discrete quotients.
    pub r2_discrete: f64,
    /// As `r1_discrete`, with interpolant quotients.
    pub r1: f64,
    /// As `r2_discrete`, with interpolant quotients.
    pub r2: f64,
}

/// Residuals of the sub-/supersolution inequalities satisfied by minimisers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffIneqReport {
    pub cells: Vec<CellResidual>,
    /// Largest discrete residual; at solver precision for converged cells.
    pub max_discrete: f64,
    /// Largest interpolant residual; vanishes at the rate of the stencil.
    pub max: f64,
}

/// Rayleigh quotient of the piecewise multilinear interpolant of `u`
/// (exact gradient and L2 integrals; potential term lumped at the nodes).
pub fn interpolant_rayleigh(form: &DiscreteForm, u: &Field) -> Result<f64> {
    let grid = form.grid();
    let v = u.values();
    let h = grid.h();
    let pot: f64 = form.potential_samples().iter().zip(v).map(|(p, x)| p * x * x).sum::<f64>() * grid.cell_volume();
    let (mut stiff, mut mass) = (0.0, 0.0);
    match grid.dim() {
        1 => {
            for w in v.windows(2) {
                let (a, b) = (w[0], w[1]);
                stiff += (b - a) * (b - a) / h;
                mass += h * (a * a + a * b + b * b) / 3.0;
            }
        }
        2 => {
            let (n0, n1) = (grid.counts()[0], grid.counts()[1]);
            for i0 in 0..n0 - 1 {
                for i1 in 0..n1 - 1 {
                    let a = v[i0 * n1 + i1];
                    let b = v[(i0 + 1) * n1 + i1];
                    let c = v[i0 * n1 + i1 + 1];
                    let d = v[(i0 + 1) * n1 + i1 + 1];
                    let (p, q) = (b - a, d - c);
                    let (r, s) = (c - a, d - b);
                    stiff += (p * p + p * q + q * q + r * r + r * s + s * s) / 3.0;
                    mass += h * h / 36.0
                        * (4.0 * (a * a + b * b + c * c + d * d)
                            + 4.0 * (a * b + a * c + b * d + c * d)
                            + 2.0 * (a * d + b * c));
                }
            }
        }
        _ => return Err(Error::Precondition("interpolant quotient needs d <= 2".into())),
    }
    if !(mass > 0.0) {
        return Err(Error::ZeroField);
    }
    Ok((stiff + pot) / mass)
}

/// Residuals of `-Δv_i + V v_i <= R(v_i) v_i` and
/// `-Δ(v_i - Σ_j v_j) + V(v_i - Σ_j v_j) >= R(v_i) v_i - Σ_j R(v_j) v_j`,
/// measured as L1 masses of the violating parts over the domain.
pub fn check_differential_inequalities(state: &PartitionState) -> Result<DiffIneqReport> {
    if !state.converged {
        return Err(Error::NotConverged);
    }
    if state.p.is_inf() {
        return Err(Error::Precondition("residual check needs a finite p".into()));
    }
    if state.overlaps() > 0 {
        return Err(Error::Precondition("field supports overlap".into()));
    }
    let form = state.base_form()?;
    let p = state.p.value();
    let k = state.k;
    let rq: Vec<f64> = state.fields.iter().map(|u| form.rayleigh(u)).collect::<Result<_>>()?;
    let rq_int: Vec<f64> = state.fields.iter().map(|u| interpolant_rayleigh(&form, u)).collect::<Result<_>>()?;
    let big = state.p.norm(&rq);
    let a: Vec<f64> = rq.iter().map(|&r| (r / big).powf(0.5 * (p - 1.0))).collect();
    let v: Vec<Vec<f64>> = state
        .fields
        .iter()
        .zip(&a)
        .map(|(u, &ai)| Ok(form.restrict(u)?.into_iter().map(|x| ai * x).collect()))
        .collect::<Result<_>>()?;
    let av: Vec<Vec<f64>> = v
        .iter()
        .map(|x| {
            let mut y = vec![0.0; x.len()];
            form.apply(x, &mut y);
            y
        })
        .collect();
    let w = form.grid().cell_volume();
    let n = form.n();
    let residuals = |r: &[f64]| -> Vec<(f64, f64)> {
        (0..k)
            .map(|i| {
                let mut r1 = 0.0;
                let mut r2 = 0.0;
                for x in 0..n {
                    r1 += (av[i][x] - r[i] * v[i][x]).max(0.0);
                    let mut lhs = av[i][x];
                    let mut rhs = r[i] * v[i][x];
                    for j in (0..k).filter(|&j| j != i) {
                        lhs -= av[j][x];
                        rhs -= r[j] * v[j][x];
                    }
                    r2 += (rhs - lhs).max(0.0);
                }
                (r1 * w, r2 * w)
            })
            .collect()
    };
    let disc = residuals(&rq);
    let cons = residuals(&rq_int);
    let cells: Vec<CellResidual> = (0..k)
        .map(|i| CellResidual {
            cell: i + 1,
            weight: a[i],
            rayleigh: rq[i],
            rayleigh_interpolant: rq_int[i],
            r1_discrete: disc[i].0,
            r2_discrete: disc[i].1,
            r1: cons[i].0,
            r2: cons[i].1,
        })
        .collect();
    let max_discrete = cells.iter().map(|c| c.r1_discrete.max(c.r2_discrete)).fold(0.0, f64::max);
    let max = cells.iter().map(|c| c.r1.max(c.r2)).fold(0.0, f64::max);
    Ok(DiffIneqReport { cells, max_discrete, max })
}
