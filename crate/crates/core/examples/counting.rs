//! Number of useful partition sizes below a level against the eigenvalue count.

use std::sync::Arc;

use specpart::geometry::{build_mask, GridSpec, Region};
use specpart::operator::{assemble, Potential};
use specpart::partition::{optimize_pinf, OptimizeOptions, Seeding, DEFAULT_P_SCHEDULE};
use specpart::spectrum::count_bounds;
use specpart::PNorm;

fn main() -> specpart::Result<()> {
    let grid = Arc::new(GridSpec::new(&[-6.0, -6.0], &[6.0, 6.0], 0.25)?);
    let domain = build_mask(&Region::ball(&[0.0, 0.0], 6.0), &grid)?;
    let v = Potential::radial_step(2.0, 3.0);
    let c = 2.5;
    let opts = OptimizeOptions { starts: 3, ..OptimizeOptions::default() };
    let mut tilde = 0;
    for k in 1..=4 {
        let (_, r) = optimize_pinf(&domain, &v, k, &DEFAULT_P_SCHEDULE, &Seeding::MultiStart, &opts)?;
        println!("k = {k}: Lambda_k,inf = {:.4}", r.strong);
        if r.strong <= c {
            tilde = k;
        }
    }
    let report = count_bounds(&assemble(&domain, &v)?, c, &[(PNorm::INF, tilde)])?;
    println!("c = {c}: N~_inf = {tilde}, N = {}, bound holds: {}", report.n, report.pass);
    Ok(())
}
