//! Optimal k-partitions of the square for p = 2; writes `cells_k<k>.pgm`.

use std::f64::consts::PI;
use std::sync::Arc;

use specpart::geometry::{DomainMask, GridSpec};
use specpart::io::write_label_pgm;
use specpart::operator::Potential;
use specpart::partition::{optimize, OptimizeOptions, Seeding};
use specpart::PNorm;

fn main() -> specpart::Result<()> {
    let grid = Arc::new(GridSpec::new(&[0.0, 0.0], &[PI, PI], PI / 32.0)?);
    let domain = DomainMask::full(&grid);
    for k in 2..=4 {
        let (state, report) = optimize(&domain, &Potential::Zero, k, PNorm::new(2.0)?, &Seeding::MultiStart, &OptimizeOptions::default())?;
        println!("k = {k}: L = {:.4}, lambdas = {:.4?}, best start {}", report.strong, report.lambdas, state.origin);
        let file = std::fs::File::create(format!("cells_k{k}.pgm"))?;
        write_label_pgm(file, grid.counts(), &state.labels())?;
    }
    Ok(())
}
