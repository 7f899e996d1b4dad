//! Bound state of a 1-D step potential: finite differences against the transcendental root.

use std::sync::Arc;

use specpart::geometry::{DomainMask, GridSpec};
use specpart::operator::{assemble, smallest_eigenpair, Potential};
use specpart::oracles::transcendental_root;

fn main() -> specpart::Result<()> {
    let (l, c) = (1.0, 5.0);
    let root = transcendental_root(l, c)?;
    println!("transcendental root: {root:.10}");
    for n in [250.0, 500.0, 1000.0, 2000.0] {
        let grid = Arc::new(GridSpec::new(&[0.0], &[30.0], 1.0 / n)?);
        let form = assemble(&DomainMask::full(&grid), &Potential::axial_step(l, c))?;
        let lambda = smallest_eigenpair(&form, 1e-12)?.lambda;
        println!("h = 1/{n:<5} lambda = {lambda:.10}  error = {:.2e}", (lambda - root).abs());
    }
    Ok(())
}
