//! Ring partition of the plane without potential: every cell energy stays below Sigma + eps.

use std::sync::Arc;

use specpart::geometry::{DomainMask, GridSpec};
use specpart::operator::Potential;
use specpart::partition::{build_rings, energy_strong};
use specpart::PNorm;

fn main() -> specpart::Result<()> {
    let grid = Arc::new(GridSpec::new(&[-30.0, -30.0], &[30.0, 30.0], 0.5)?);
    let domain = DomainMask::full(&grid);
    let (k, eps) = (3, 0.2);
    let rings = build_rings(&domain, &Potential::Zero, k, eps, 0.0, 1e-10)?;
    for ((r, big), l) in rings.radii.iter().zip(&rings.annulus_lambdas) {
        println!("annulus ({r:5.2}, {big:5.2})  lambda = {l:.4}");
    }
    let e = energy_strong(&rings.cells, &Potential::Zero, PNorm::INF, 1e-10)?;
    println!("cells: {:.4?}, all <= {eps}: {}", e.lambdas, e.lambdas.iter().all(|&l| l <= eps));
    Ok(())
}
