use std::f64::consts::PI;

use specpart::oracles::{halfstrip_spectrum, rectangle_eigs, strip_room_energy, HalfStripSpec, BESSEL_J0_FIRST_ZERO};

/// `(pi / (pi - 1/20))^2 + (pi / 2^39)^2`, evaluated independently in double precision.
const ROOM_20: f64 = 1.0326073503177904;

#[test]
fn room_energy_frozen_value() {
    assert!((strip_room_energy(20) - ROOM_20).abs() < 1e-15);
    // the limit 1 is approached like 2 / (pi j)
    let e = strip_room_energy(1000);
    assert!(e.is_finite() && (e - 1.0 - 2.0 / (PI * 1000.0)).abs() < 1e-6);
}

#[test]
fn rectangle_degeneracies() {
    assert_eq!(rectangle_eigs(PI, PI, 4), vec![2.0, 5.0, 5.0, 8.0]);
    let r = rectangle_eigs(2.0 * PI, PI, 3);
    assert!((r[0] - 1.25).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12 && (r[2] - 3.25).abs() < 1e-12);
}

#[test]
fn halfstrip_sigma_is_c_plus_inverse_width_squared() {
    let spec = HalfStripSpec { ell: 1.5, l: 1.0, c: 8.0 };
    let s = halfstrip_spectrum(&spec, 4).unwrap();
    assert!((s.sigma - (8.0 + 1.0 / 2.25)).abs() < 1e-12);
    assert!(s.eigenvalues.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(s.m, s.eigenvalues.iter().filter(|&&l| l < s.sigma).count());
}

#[test]
fn bessel_zero() {
    // J_0 by its power series changes sign at the tabulated zero
    let j0 = |x: f64| {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= -(x * x / 4.0) / (k * k) as f64;
            sum += term;
        }
        sum
    };
    assert!(j0(BESSEL_J0_FIRST_ZERO - 1e-12) > 0.0 && j0(BESSEL_J0_FIRST_ZERO + 1e-12) < 0.0);
}
