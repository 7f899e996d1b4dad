use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use specpart::geometry::{build_mask, disjoint, DomainMask, GridSpec, Region};
use specpart::operator::{assemble, Field, Potential};
use specpart::partition::{
    build_rings, check_differential_inequalities, cutoff_pair, energy_strong, ims_decompose, optimize, optimize_pinf,
    voronoi_labels, OptimizeOptions, Seeding, DEFAULT_P_SCHEDULE,
};
use specpart::{Error, PNorm};

fn square(h: f64) -> DomainMask {
    DomainMask::full(&Arc::new(GridSpec::new(&[0.0, 0.0], &[PI, PI], h).unwrap()))
}

/// First eigenvalue of the 5-point Laplacian on an `nx x ny` block of interior points.
fn discrete_block(h: f64, nx: usize, ny: usize) -> f64 {
    let s = |n: usize| (PI / (2.0 * (n + 1) as f64)).sin().powi(2);
    4.0 / (h * h) * (s(nx) + s(ny))
}

#[test]
fn explicit_halves_match_the_block_oracle() {
    let h = PI / 16.0;
    let sq = square(h);
    let grid = sq.grid().clone();
    let left = DomainMask::from_fn(&grid, "left", |_, x| x[0] < PI / 2.0 - 1e-9);
    let right = DomainMask::from_fn(&grid, "right", |_, x| x[0] > PI / 2.0 + 1e-9);
    let e = energy_strong(&[left, right], &Potential::Zero, PNorm::INF, 1e-12).unwrap();
    let oracle = discrete_block(h, 7, 15);
    for l in &e.lambdas {
        assert!((l - oracle).abs() < 1e-9, "{l} vs {oracle}");
    }
    assert!(e.equipartition_gap < 1e-9);
}

#[test]
fn overlapping_cells_are_rejected() {
    let sq = square(PI / 8.0);
    assert!(matches!(
        energy_strong(&[sq.clone(), sq], &Potential::Zero, PNorm::INF, 1e-10),
        Err(Error::OverlappingCells(..))
    ));
}

#[test]
fn square_two_partition_reaches_the_nodal_level() {
    let h = PI / 24.0;
    let opts = OptimizeOptions::default();
    let (state, report) = optimize_pinf(&square(h), &Potential::Zero, 2, &DEFAULT_P_SCHEDULE, &Seeding::MultiStart, &opts).unwrap();
    state.check_admissible(1e-10).unwrap();
    // the nodal split along a midline; 23 interior points per axis cannot be halved, so allow one column
    let upper = discrete_block(h, 11, 23);
    assert!(report.strong <= upper + 1e-6, "{} > {upper} ({})", report.strong, state.origin);
    assert!(report.strong >= 4.9, "{}", report.strong);
    assert!(report.equipartition_gap <= 1e-2 * report.strong);
}

#[test]
fn optimize_rejects_infinite_p() {
    let r = optimize(&square(PI / 8.0), &Potential::Zero, 2, PNorm::INF, &Seeding::Voronoi, &OptimizeOptions::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn single_cell_is_the_ground_state() {
    let h = PI / 16.0;
    let (_, report) = optimize(&square(h), &Potential::Zero, 1, PNorm::new(2.0).unwrap(), &Seeding::MultiStart, &OptimizeOptions::default()).unwrap();
    assert!((report.strong - discrete_block(h, 15, 15)).abs() < 1e-9);
}

#[test]
fn converged_interval_partition_has_small_residuals() {
    let grid = Arc::new(GridSpec::new(&[0.0], &[PI], PI / 128.0).unwrap());
    let domain = DomainMask::full(&grid);
    let opts = OptimizeOptions { tol: 1e-12, ..OptimizeOptions::default() };
    let (state, _) = optimize(&domain, &Potential::Zero, 2, PNorm::new(2.0).unwrap(), &Seeding::MultiStart, &opts).unwrap();
    let report = check_differential_inequalities(&state).unwrap();
    assert!(report.max_discrete < 1e-6, "{}", report.max_discrete);
    assert!(report.max < 5e-3, "{}", report.max);
}

#[test]
fn rings_stay_below_the_target() {
    let grid = Arc::new(GridSpec::new(&[-12.0, -12.0], &[12.0, 12.0], 0.5).unwrap());
    let domain = DomainMask::full(&grid);
    let rings = build_rings(&domain, &Potential::Zero, 2, 0.5, 0.0, 1e-10).unwrap();
    assert!(rings.radii.len() >= 2);
    assert!(rings.annulus_lambdas.iter().all(|&l| l <= 0.5));
    assert!(disjoint(&rings.cells[0], &rings.cells[1]).unwrap());
    assert!(build_rings(&domain, &Potential::Zero, 40, 0.5, 0.0, 1e-10).is_err());
}

#[test]
fn localisation_needs_room_for_the_cutoff() {
    let grid = Arc::new(GridSpec::new(&[-3.0, -3.0], &[3.0, 3.0], 0.25).unwrap());
    let mask = Arc::new(DomainMask::full(&grid));
    let form = assemble(&mask, &Potential::Zero).unwrap();
    let u = Field::from_fn(mask, |_| 1.0);
    assert!(matches!(ims_decompose(&form, &u, 2.0), Err(Error::WindowTooSmall(_))));
    assert!(ims_decompose(&form, &u, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn cutoffs_partition_unity(t in 0.0f64..5.0) {
        let (p, q) = cutoff_pair(t);
        prop_assert!((p * p + q * q - 1.0).abs() < 1e-14);
        prop_assert!(p >= 0.0 && q >= 0.0);
    }

    /// The form defect equals the edge sum `u_a u_b ((Δφ)² + (Δψ)²) h^(d-2)`,
    /// which is positive for positive fields.
    #[test]
    fn localisation_defect_is_the_edge_sum(a in 0.1f64..2.0, b in -1.0f64..1.0, n in 1.0f64..2.5, c in 0.1f64..3.0) {
        let h = 0.25;
        let grid = Arc::new(GridSpec::new(&[-5.0, -5.0], &[5.0, 5.0], h).unwrap());
        let mask = Arc::new(DomainMask::full(&grid));
        let form = assemble(&mask, &Potential::radial_step(1.0, c)).unwrap();
        let u = Field::from_fn(mask.clone(), |x| (-(a * (x[0] * x[0] + x[1] * x[1]))).exp() * (1.5 + b * x[0].sin()));
        let split = ims_decompose(&form, &u, n).unwrap();
        let cut = |idx: usize| {
            let x = grid.coord(idx);
            cutoff_pair((x[0] * x[0] + x[1] * x[1]).sqrt() / n)
        };
        let v = u.values();
        let mut sum = 0.0;
        for idx in 0..grid.len() {
            grid.for_each_neighbor(idx, |j| {
                if j > idx {
                    let ((pa, qa), (pb, qb)) = (cut(idx), cut(j));
                    sum += v[idx] * v[j] * ((pa - pb).powi(2) + (qa - qb).powi(2));
                }
            });
        }
        prop_assert!(sum > 0.0);
        // whole minus parts cancels to about 1e-14 absolute
        prop_assert!((split.residual - sum).abs() <= 1e-12 + 1e-8 * sum, "{} vs {}", split.residual, sum);
    }

    #[test]
    fn voronoi_cells_are_separated(k in 2usize..6, seed in any::<u64>()) {
        let sq = square(PI / 16.0);
        let labels = voronoi_labels(&sq, k, seed);
        let grid = sq.grid().clone();
        for cell in 1..=k as u32 {
            prop_assert!(labels.iter().any(|&l| l == cell));
        }
        for idx in 0..grid.len() {
            if labels[idx] == 0 {
                continue;
            }
            prop_assert!(sq.contains(idx));
            grid.for_each_neighbor(idx, |j| {
                assert!(labels[j] == 0 || labels[j] == labels[idx]);
            });
        }
    }

    #[test]
    fn seeded_runs_descend_and_stay_admissible(seed in 0u64..1000, k in 2usize..4) {
        let grid = Arc::new(GridSpec::new(&[-2.0, -2.0], &[2.0, 2.0], 0.25).unwrap());
        let domain = build_mask(&Region::ball(&[0.0, 0.0], 1.9), &grid).unwrap();
        let opts = OptimizeOptions { seed, ..OptimizeOptions::default() };
        let (state, _) = optimize(&domain, &Potential::Zero, k, PNorm::new(4.0).unwrap(), &Seeding::Voronoi, &opts).unwrap();
        state.check_admissible(1e-10).unwrap();
        prop_assert!(state.history.windows(2).all(|w| w[1].energy <= w[0].energy * (1.0 + 1e-12)));
    }
}
