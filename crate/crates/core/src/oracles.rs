//! Grid-free reference values for 1-D and separable 2-D problems.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Left-hand side minus right-hand side of `tan(sqrt(l) L) = -1 / sqrt(c/l - 1)`.
pub fn transcendental_residual(l: f64, c: f64, lambda: f64) -> f64 {
    (lambda.sqrt() * l).tan() + 1.0 / (c / lambda - 1.0).sqrt()
}

/// The unique bound state of `-u'' + V_L u` on the half-line with a Dirichlet
/// condition at 0, where `V_L = c 1_{x > L}`.
///
/// Requires `pi^2/(4 L^2) < c < pi^2/L^2`; the root is bracketed in
/// `(pi^2/(4L^2), min(c, pi^2/L^2))` and found by bisection.
pub fn transcendental_root(l: f64, c: f64) -> Result<f64> {
    let lo0 = PI * PI / (4.0 * l * l);
    let hi0 = PI * PI / (l * l);
    if !(l > 0.0 && c > lo0 && c < hi0) {
        return Err(Error::BracketInvalid(format!(
            "need pi^2/(4L^2) < c < pi^2/L^2, got L = {l}, c = {c} (interval ({lo0}, {hi0}))"
        )));
    }
    let (mut lo, mut hi) = (lo0, c.min(hi0));
    // f -> -inf at lo, f > 0 towards hi
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        if transcendental_residual(l, c, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Half-strip `(0, inf) x (0, ell pi)` with step potential `V_L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfStripSpec {
    /// Width is `ell * pi`.
    pub ell: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfStripSpectrum {
    pub lambda0: f64,
    /// `lambda0 + j^2 / ell^2`, `j = 1..=count`.
    pub eigenvalues: Vec<f64>,
    /// `c + 1/ell^2`.
    pub sigma: f64,
    /// Number of product eigenvalues strictly below `sigma`.
    pub m: usize,
}

impl HalfStripSpec {
    pub fn width(&self) -> f64 {
        self.ell * PI
    }

    /// `ell` placing `c - lambda0` in the middle of the window for exactly `m` eigenvalues below sigma.
    pub fn for_count(l: f64, c: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("m must be at least 1".into()));
        }
        let lambda0 = transcendental_root(l, c)?;
        let m = m as f64;
        let ell2 = (2.0 * m * m + 2.0 * m - 1.0) / (2.0 * (c - lambda0));
        Ok(Self { ell: ell2.sqrt(), l, c })
    }
}

pub fn halfstrip_spectrum(spec: &HalfStripSpec, count: usize) -> Result<HalfStripSpectrum> {
    if !(spec.ell > 0.0) {
        return Err(Error::Precondition(format!("ell must be positive, got {}", spec.ell)));
    }
    let lambda0 = transcendental_root(spec.l, spec.c)?;
    let inv = 1.0 / (spec.ell * spec.ell);
    let sigma = spec.c + inv;
    let eigenvalues = (1..=count).map(|j| lambda0 + (j * j) as f64 * inv).collect();
    let mut m = 0;
    while lambda0 + ((m + 1) * (m + 1)) as f64 * inv < sigma {
        m += 1;
    }
    Ok(HalfStripSpectrum { lambda0, eigenvalues, sigma, m })
}

/// Smallest `count` Dirichlet eigenvalues of the rectangle `(0,a) x (0,b)`.
pub fn rectangle_eigs(a: f64, b: f64, count: usize) -> Vec<f64> {
    let mut vals = Vec::with_capacity(count * count);
    for m in 1..=count {
        for n in 1..=count {
            let (m, n) = (m as f64, n as f64);
            vals.push(PI * PI * (m * m / (a * a) + n * n / (b * b)));
        }
    }
    vals.sort_by(f64::total_cmp);
    vals.truncate(count);
    vals
}

/// Dirichlet eigenvalues `(j pi / a)^2` of the interval `(0, a)`.
pub fn interval_eigs(a: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|j| (j as f64 * PI / a).powi(2)).collect()
}

/// Ground-state energy of the `j`-th room of the two-cell strip construction.
pub fn strip_room_energy(j: u32) -> f64 {
    let jf = j as f64;
    // 2^(2j) - 2^(2j-1), which overflows to inf (energy term 0) for large j
    let len = 2f64.powi(2 * j as i32 - 1);
    (PI / (PI - 1.0 / jf)).powi(2) + (PI / len).powi(2)
}

/// First zero of the Bessel function `J_0`.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// CSV rows `name,value` for a list of named oracle values.
pub fn to_csv(rows: &[(String, f64)]) -> String {
    let mut s = String::from("name,value\n");
    for (name, v) in rows {
        let _ = writeln!(s, "{name},{v:.17e}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_satisfies_equation() {
        let l0 = transcendental_root(1.0, 5.0).unwrap();
        assert!(l0 > PI * PI / 4.0 && l0 < 5.0);
        assert!(transcendental_residual(1.0, 5.0, l0).abs() <= 1e-9);
    }

    #[test]
    fn bracket_rejected_outside_window() {
        assert!(matches!(transcendental_root(1.0, 20.0), Err(Error::BracketInvalid(_))));
        assert!(matches!(transcendental_root(1.0, 2.0), Err(Error::BracketInvalid(_))));
    }

    #[test]
    fn rectangle_values() {
        assert_eq!(rectangle_eigs(PI, PI, 3).iter().map(|v| v.round()).collect::<Vec<_>>(), vec![2.0, 5.0, 5.0]);
        assert!((rectangle_eigs(PI / 2.0, PI, 1)[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn room_energy_decreases() {
        for j in 2..30 {
            assert!(strip_room_energy(j + 1) < strip_room_energy(j));
        }
        let j1 = (PI / (PI - 1.0)).powi(2) + (PI / 2.0).powi(2);
        assert!((strip_room_energy(1) - j1).abs() < 1e-14);
    }

    #[test]
    fn halfstrip_count_is_m() {
        for m in 1..5 {
            let spec = HalfStripSpec::for_count(1.0, 8.0, m).unwrap();
            assert_eq!(halfstrip_spectrum(&spec, 10).unwrap().m, m);
        }
    }
}
