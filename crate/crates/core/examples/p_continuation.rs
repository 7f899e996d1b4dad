//! Energy of the square 2-partition along the p schedule, ending at p = inf.

use std::f64::consts::PI;
use std::sync::Arc;

use specpart::geometry::{DomainMask, GridSpec};
use specpart::operator::Potential;
use specpart::partition::{optimize, optimize_pinf, OptimizeOptions, Seeding, DEFAULT_P_SCHEDULE};
use specpart::PNorm;

fn main() -> specpart::Result<()> {
    let grid = Arc::new(GridSpec::new(&[0.0, 0.0], &[PI, PI], PI / 32.0)?);
    let domain = DomainMask::full(&grid);
    let opts = OptimizeOptions::default();
    for &p in &DEFAULT_P_SCHEDULE {
        let (_, r) = optimize(&domain, &Potential::Zero, 2, PNorm::new(p)?, &Seeding::MultiStart, &opts)?;
        println!("p = {p:<3} Lambda = {:.5}  gap = {:.2e}", r.strong, r.equipartition_gap);
    }
    let (_, r) = optimize_pinf(&domain, &Potential::Zero, 2, &DEFAULT_P_SCHEDULE, &Seeding::MultiStart, &opts)?;
    println!("p = inf Lambda = {:.5}  gap = {:.2e}", r.strong, r.equipartition_gap);
    Ok(())
}
