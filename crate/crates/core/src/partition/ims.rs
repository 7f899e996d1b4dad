use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::DomainMask;
use crate::operator::{DiscreteForm, Field};

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `s <= 0`, 1 for `s >= 1`.
fn smooth_step(s: f64) -> f64 {
    let (a, b) = (bump(s), bump(1.0 - s));
    a / (a + b)
}

fn smooth_step_derivative(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let (a, b) = (bump(s), bump(1.0 - s));
    let (da, db) = (a / (s * s), b / ((1.0 - s) * (1.0 - s)));
    (da * b + a * db) / ((a + b) * (a + b))
}

/// Radial cutoff pair with `φ² + ψ² = 1`: `φ = 1` on `[0, 1]`, `φ = 0` on `[2, inf)`.
pub fn cutoff_pair(t: f64) -> (f64, f64) {
    let theta = FRAC_PI_2 * smooth_step(t - 1.0);
    (theta.cos(), theta.sin())
}

/// `sup_t (φ'(t)² + ψ'(t)²)` for the unit-scale cutoffs.
pub fn cutoff_constant() -> f64 {
    let n = 20_000;
    let m = (1..n)
        .map(|i| smooth_step_derivative(i as f64 / n as f64))
        .fold(0.0, f64::max);
    FRAC_PI_2 * FRAC_PI_2 * m * m
}

/// Localised pieces of a field and the localisation error.
#[derive(Clone, Debug)]
pub struct ImsSplit {
    /// `u φ_n`.
    pub inner: Field,
    /// `u ψ_n`.
    pub outer: Field,
    /// `|a_V(u) - a_V(u φ_n) - a_V(u ψ_n)|`.
    pub residual: f64,
    /// `C ||u||² / n²`.
    pub bound: f64,
}

/// Splits `u` with the cutoffs `φ(|x|/n)`, `ψ(|x|/n)` and measures the form defect.
pub fn ims_decompose(form: &DiscreteForm, u: &Field, n: f64) -> Result<ImsSplit> {
    if !(n >= 1.0) {
        return Err(Error::Precondition(format!("cutoff scale n must be >= 1, got {n}")));
    }
    let grid = form.grid().clone();
    for a in 0..grid.dim() {
        let (lo, hi) = (grid.window_lo(a), grid.window_hi(a));
        if hi < 2.0 * n || (lo < 0.0 && lo > -2.0 * n) {
            return Err(Error::WindowTooSmall(format!("window [{lo}, {hi}] on axis {a} does not reach radius {}", 2.0 * n)));
        }
    }
    let d = grid.dim();
    let mut inner = u.clone();
    let mut outer = u.clone();
    for (idx, (vi, vo)) in inner.values_mut().iter_mut().zip(outer.values_mut().iter_mut()).enumerate() {
        if *vi == 0.0 {
            continue;
        }
        let x = grid.coord(idx);
        let t = x[..d].iter().map(|c| c * c).sum::<f64>().sqrt() / n;
        let (phi, psi) = cutoff_pair(t);
        *vi *= phi;
        *vo *= psi;
    }
    let whole = form.form_energy(u)?;
    let residual = (whole - form.form_energy(&inner)? - form.form_energy(&outer)?).abs();
    Ok(ImsSplit { inner, outer, residual, bound: cutoff_constant() * u.norm_sq() / (n * n) })
}

/// Random positive field `rho(|x|) m(log2 |x|, θ)` with `rho = |x|^(-d/2)` outside the
/// unit ball and `m` periodic in both arguments, normalised to unit mass.
///
/// Doubling the cutoff scale maps the field onto itself up to a constant, so
/// the localisation error scales exactly like `n^-2` in the continuum.
pub fn log_periodic_field(mask: Arc<DomainMask>, seed: u64, modes: usize) -> Result<Field> {
    let d = mask.grid().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(f64, f64, f64)> = (0..modes)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)))
        .collect();
    // keeps the modulation within [0.5, 1.5]
    let amp = 0.5 / modes.max(1) as f64;
    let mut u = Field::from_fn(mask, |x| {
        let r = x[..d].iter().map(|c| c * c).sum::<f64>().sqrt();
        let rho = if r < 1.0 { 1.0 } else { r.powf(-0.5 * d as f64) };
        let s = r.max(1.0).log2();
        let theta = if d == 2 { x[1].atan2(x[0]) } else { x[0].signum() };
        let m: f64 = terms
            .iter()
            .enumerate()
            .map(|(j, &(a, b, c))| {
                let j = (j + 1) as f64;
                a * (TAU * j * s + b).sin() * (j * theta + c).cos()
            })
            .sum();
        rho * (1.0 + amp * m)
    });
    u.normalize()?;
    Ok(u)
}
