use std::sync::Arc;

use proptest::prelude::*;
use specpart::geometry::{build_mask, DomainMask, GridSpec, Region};
use specpart::operator::{assemble, Potential};
use specpart::spectrum::{
    annulus_profile, count_bounds, persson_sweep, sigma_estimate, threshold, threshold_value, PerssonSweep, SweepRow,
};
use specpart::{Error, PNorm};

fn sweep_of(values: &[(f64, f64)]) -> PerssonSweep {
    PerssonSweep {
        rows: values.iter().map(|&(r, lambda)| SweepRow { r, lambda, monotone_ok: true }).collect(),
        annulus: Vec::new(),
        window_too_small: false,
    }
}

#[test]
fn sigma_uses_last_value_and_extrapolation() {
    let s = sigma_estimate(&sweep_of(&[(1.0, 1.0), (2.0, 1.5), (4.0, 1.75)]), 1e3).unwrap();
    assert_eq!(s.sigma, 1.75);
    // lambda = S - a/r through (2, 1.5) and (4, 1.75) gives S = 2
    assert!((s.extrapolated - 2.0).abs() < 1e-12);
    assert!((s.uncertainty - 0.25).abs() < 1e-12);
}

#[test]
fn sigma_sentinel_above_cap() {
    let s = sigma_estimate(&sweep_of(&[(1.0, 10.0), (2.0, 100.0), (3.0, 2000.0)]), 1e3).unwrap();
    assert!(s.sigma.is_infinite());
    assert!(matches!(sigma_estimate(&sweep_of(&[(1.0, 1.0), (2.0, 2.0)]), 1e3), Err(Error::InsufficientSweep(2))));
}

#[test]
fn threshold_values() {
    let inf = PNorm::INF;
    assert_eq!(threshold_value(3, inf, 7.0, 5.0), 7.0);
    let p2 = PNorm::new(2.0).unwrap();
    assert!((threshold_value(2, p2, 4.0, 3.0) - 5.0).abs() < 1e-12);
    // k = 1 ignores the previous level
    assert_eq!(threshold_value(1, p2, 4.0, 3.0), 4.0);
    let t = threshold(2, p2, 4.0, 3.0).with_energy(4.9, 0.0);
    assert!(t.strict && t.holder_bound_holds());
    let t = threshold(2, p2, 4.0, 3.0).with_energy(4.9, 0.2);
    assert!(!t.strict);
}

#[test]
fn halfstrip_sweep_approaches_the_strip_level() {
    // width pi, no potential: the essential spectrum starts at 1
    let pi = std::f64::consts::PI;
    let grid = Arc::new(GridSpec::from_counts(&[0.0, 0.0], pi / 16.0, &[124, 17]).unwrap());
    let mask = build_mask(&Region::Halfstrip { start: 0.0, lo: 0.0, width: pi }, &grid).unwrap();
    let sweep = persson_sweep(&mask, &Potential::Zero, &[2.0, 4.0, 8.0], 1e-10).unwrap();
    assert!(sweep.monotone());
    let s = sigma_estimate(&sweep, 1e3).unwrap();
    assert!(s.sigma > 1.0 && s.sigma < 1.2, "{}", s.sigma);
}

#[test]
fn annulus_values_decrease_in_outer_radius() {
    let grid = Arc::new(GridSpec::new(&[-6.0, -6.0], &[6.0, 6.0], 0.25).unwrap());
    let mask = DomainMask::full(&grid);
    let rows = annulus_profile(&mask, &Potential::radial_step(1.0, 2.0), 1.0, &[2.0, 3.0, 4.0, 5.0], 1e-10).unwrap();
    assert!(rows.windows(2).all(|w| w[1].lambda <= w[0].lambda + 1e-8));
    assert!(rows.iter().all(|r| r.monotone_ok));
    assert!(annulus_profile(&mask, &Potential::Zero, 2.0, &[1.5, 3.0], 1e-10).is_err());
}

#[test]
fn count_bounds_flags_violations() {
    let grid = Arc::new(GridSpec::new(&[0.0], &[std::f64::consts::PI], std::f64::consts::PI / 32.0).unwrap());
    let form = assemble(&DomainMask::full(&grid), &Potential::Zero).unwrap();
    // eigenvalues near 1, 4, 9: two of them below 5
    let ok = count_bounds(&form, 5.0, &[(PNorm::INF, 2), (PNorm::new(2.0).unwrap(), 1)]).unwrap();
    assert_eq!(ok.n, 2);
    assert!(ok.pass);
    let bad = count_bounds(&form, 5.0, &[(PNorm::INF, 3)]).unwrap();
    assert!(!bad.pass);
}

proptest! {
    #[test]
    fn holder_bound_below_level(k in 2usize..8, p in 1.0f64..64.0, sigma in 0.1f64..100.0, frac in 0.0f64..1.0) {
        let p = PNorm::new(p).unwrap();
        // Lambda_{k-1,p} <= (k-1)^(1/p) Sigma whenever the threshold regime applies
        let prev = frac * p.holder_factor(k - 1) * sigma;
        let t = threshold(k, p, sigma, prev);
        prop_assert!(t.holder_bound_holds());
        prop_assert!(t.threshold >= sigma * (1.0 - 1e-15));
    }

    #[test]
    fn pnorm_is_monotone_in_p(values in prop::collection::vec(0.0f64..100.0, 1..8), p in 1.0f64..50.0, dp in 0.0f64..50.0) {
        let a = PNorm::new(p).unwrap().norm(&values);
        let b = PNorm::new(p + dp).unwrap().norm(&values);
        let m = PNorm::INF.norm(&values);
        prop_assert!(b <= a * (1.0 + 1e-12));
        prop_assert!(m <= b * (1.0 + 1e-12));
        prop_assert!(a <= PNorm::new(p).unwrap().holder_factor(values.len()) * m * (1.0 + 1e-12));
    }
}
