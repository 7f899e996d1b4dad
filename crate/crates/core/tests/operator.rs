use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use specpart::geometry::{build_mask, DomainMask, GridSpec, Region};
use specpart::operator::{assemble, count_below, k_smallest, smallest_eigenpair, Field, Potential};
use specpart::oracles::{interval_eigs, transcendental_residual, transcendental_root};

/// Bound state of `-u'' + c 1_{x > 1} u` on the half-line, from an RK4 shooting oracle.
const STEP_ROOT_L1_C5: f64 = 4.068573880585728;

/// Eigenvalues `(4/h^2) sin^2(j h / 2)` of the 3-point Laplacian on `(0, pi)`.
fn discrete_interval(h: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|j| 4.0 / (h * h) * (j as f64 * h / 2.0).sin().powi(2)).collect()
}

fn square(h: f64) -> DomainMask {
    DomainMask::full(&Arc::new(GridSpec::new(&[0.0, 0.0], &[PI, PI], h).unwrap()))
}

/// RK4 for `u'' = (V - lambda) u` from `u(0) = 0, u'(0) = 1`; returns `u(x_end)`.
fn shoot(lambda: f64, l: f64, c: f64, x_end: f64, steps_per_unit: usize) -> f64 {
    let rhs = |x: f64, u: f64| (if x > l { c } else { 0.0 } - lambda) * u;
    let (mut u, mut du) = (0.0, 1.0);
    for (a, b) in [(0.0, l), (l, x_end)] {
        let n = ((b - a) * steps_per_unit as f64).round() as usize;
        let h = (b - a) / n as f64;
        // evaluate V strictly inside each segment
        let mid = 0.5 * (a + b);
        for _ in 0..n {
            let k1 = (du, rhs(mid, u));
            let k2 = (du + 0.5 * h * k1.1, rhs(mid, u + 0.5 * h * k1.0));
            let k3 = (du + 0.5 * h * k2.1, rhs(mid, u + 0.5 * h * k2.0));
            let k4 = (du + h * k3.1, rhs(mid, u + h * k3.0));
            u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            du += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
    }
    u
}

#[test]
fn shooting_oracle_reproduces_frozen_root() {
    let (mut lo, mut hi) = (PI * PI / 4.0 + 1e-9, 5.0 - 1e-9);
    let s_lo = shoot(lo, 1.0, 5.0, 14.0, 1000).signum();
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid, 1.0, 5.0, 14.0, 1000).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((0.5 * (lo + hi) - STEP_ROOT_L1_C5).abs() < 1e-8);
}

#[test]
fn transcendental_root_matches_frozen_value() {
    let r = transcendental_root(1.0, 5.0).unwrap();
    assert!((r - STEP_ROOT_L1_C5).abs() < 1e-9, "{r}");
    assert!(transcendental_residual(1.0, 5.0, r).abs() < 1e-6);
    assert!(transcendental_root(1.0, 20.0).is_err());
    assert!(transcendental_root(1.0, 2.0).is_err());
}

#[test]
fn step_bound_state_on_coarse_grid() {
    let grid = Arc::new(GridSpec::new(&[0.0], &[20.0], 1.0 / 400.0).unwrap());
    let form = assemble(&DomainMask::full(&grid), &Potential::axial_step(1.0, 5.0)).unwrap();
    let l = smallest_eigenpair(&form, 1e-10).unwrap().lambda;
    assert!((l - STEP_ROOT_L1_C5).abs() < 1e-4, "{l}");
}

#[test]
fn interval_matches_discrete_spectrum() {
    let h = PI / 64.0;
    let grid = Arc::new(GridSpec::new(&[0.0], &[PI], h).unwrap());
    let form = assemble(&DomainMask::full(&grid), &Potential::Zero).unwrap();
    let pairs = k_smallest(&form, 4, 1e-12).unwrap();
    for (p, d) in pairs.iter().zip(discrete_interval(h, 4)) {
        assert!((p.lambda - d).abs() < 1e-9, "{} vs {d}", p.lambda);
        assert!(p.residual < 1e-8);
    }
    // leading error term j^4 h^2 / 12 of the 3-point stencil
    let cont = interval_eigs(PI, 4);
    for (j, (p, c)) in pairs.iter().zip(&cont).enumerate() {
        let j = (j + 1) as f64;
        assert!(c - p.lambda <= 1.01 * j.powi(4) * h * h / 12.0 && p.lambda < *c);
    }
}

#[test]
fn square_matches_discrete_spectrum() {
    let h = PI / 32.0;
    let form = assemble(&square(h), &Potential::Zero).unwrap();
    let d = discrete_interval(h, 3);
    let mut expected = vec![d[0] + d[0], d[0] + d[1], d[1] + d[0], d[1] + d[1], d[0] + d[2], d[2] + d[0]];
    expected.sort_by(f64::total_cmp);
    let pairs = k_smallest(&form, 6, 1e-12).unwrap();
    for (p, e) in pairs.iter().zip(&expected) {
        assert!((p.lambda - e).abs() < 1e-8, "{} vs {e}", p.lambda);
    }
}

#[test]
fn inertia_count_matches_spectrum() {
    let h = PI / 16.0;
    let form = assemble(&square(h), &Potential::Zero).unwrap();
    let d = discrete_interval(h, 15);
    let c = 12.0;
    let mut expected = 0;
    for a in &d {
        for b in &d {
            if a + b <= c {
                expected += 1;
            }
        }
    }
    assert_eq!(count_below(&form, c).unwrap(), expected);
}

#[test]
fn too_many_eigenpairs_is_an_error() {
    let grid = Arc::new(GridSpec::new(&[0.0], &[1.0], 0.25).unwrap());
    let form = assemble(&DomainMask::full(&grid), &Potential::Zero).unwrap();
    assert!(k_smallest(&form, 4, 1e-10).is_err());
}

#[test]
fn rayleigh_of_eigenvector_is_the_eigenvalue() {
    let grid = Arc::new(GridSpec::new(&[-2.0, -2.0], &[2.0, 2.0], 0.125).unwrap());
    let mask = build_mask(&Region::ball(&[0.0, 0.0], 1.8), &grid).unwrap();
    let form = assemble(&mask, &Potential::radial_step(1.0, 3.0)).unwrap();
    let pair = smallest_eigenpair(&form, 1e-12).unwrap();
    assert!((form.rayleigh(&pair.vector).unwrap() - pair.lambda).abs() < 1e-9);
    assert!((pair.vector.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn tabulated_potential_validates_length() {
    let grid = GridSpec::new(&[0.0], &[1.0], 0.25).unwrap();
    assert!(Potential::Tabulated { values: vec![0.0; 4] }.validate(&grid).is_err());
    assert!(Potential::Tabulated { values: vec![-1.0; 5] }.validate(&grid).is_err());
    assert!(Potential::Tabulated { values: vec![1.0; 5] }.validate(&grid).is_ok());
}

fn random_mask(grid: &Arc<GridSpec>, bits: &[bool]) -> DomainMask {
    let ind: Vec<bool> = (0..grid.len()).map(|i| bits[i % bits.len()]).collect();
    DomainMask::from_indicator(grid, "random", ind).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn form_is_symmetric_and_positive(
        bits in prop::collection::vec(any::<bool>(), 1..60),
        xs in prop::collection::vec(-1.0f64..1.0, 144),
        ys in prop::collection::vec(-1.0f64..1.0, 144),
        c in 0.0f64..10.0,
    ) {
        let grid = Arc::new(GridSpec::from_counts(&[-1.0, -1.0], 2.0 / 11.0, &[12, 12]).unwrap());
        let mask = random_mask(&grid, &bits);
        prop_assume!(!mask.is_empty());
        let form = assemble(&mask, &Potential::radial_step(0.5, c)).unwrap();
        let n = form.n();
        let (x, y) = (&xs[..n], &ys[..n]);
        let (mut ax, mut ay) = (vec![0.0; n], vec![0.0; n]);
        form.apply(x, &mut ax);
        form.apply(y, &mut ay);
        let xay: f64 = x.iter().zip(&ay).map(|(a, b)| a * b).sum();
        let yax: f64 = y.iter().zip(&ax).map(|(a, b)| a * b).sum();
        prop_assert!((xay - yax).abs() <= 1e-9 * (1.0 + xay.abs()));
        let xax: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        prop_assert!(xax >= -1e-12);
    }

    #[test]
    fn rayleigh_bounds_the_ground_state(seed in 0u64..1000) {
        let grid = Arc::new(GridSpec::new(&[0.0, 0.0], &[PI, PI], PI / 12.0).unwrap());
        let mask = Arc::new(DomainMask::full(&grid));
        let form = assemble(&mask, &Potential::Zero).unwrap();
        let lambda = smallest_eigenpair(&form, 1e-12).unwrap().lambda;
        let u = Field::from_fn(mask, |x| ((seed as f64 + 1.0) * x[0]).sin().abs() + x[1] * (PI - x[1]));
        prop_assert!(form.rayleigh(&u).unwrap() >= lambda - 1e-9);
    }
}
