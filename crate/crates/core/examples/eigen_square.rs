//! Lowest Dirichlet eigenvalues of the square (0, pi)^2 against separation of variables.

use std::f64::consts::PI;
use std::sync::Arc;

use specpart::geometry::{DomainMask, GridSpec};
use specpart::operator::{assemble, k_smallest, Potential};
use specpart::oracles::rectangle_eigs;

fn main() -> specpart::Result<()> {
    let n: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64.0);
    let grid = Arc::new(GridSpec::new(&[0.0, 0.0], &[PI, PI], PI / n)?);
    let form = assemble(&DomainMask::full(&grid), &Potential::Zero)?;
    let pairs = k_smallest(&form, 6, 1e-10)?;
    println!("h = pi/{n}, {} unknowns", form.n());
    println!("{:>3} {:>12} {:>8} {:>10}", "j", "lambda", "oracle", "residual");
    for (j, (p, o)) in pairs.iter().zip(rectangle_eigs(PI, PI, 6)).enumerate() {
        println!("{:>3} {:>12.6} {:>8.3} {:>10.2e}", j + 1, p.lambda, o, p.residual);
    }
    Ok(())
}
