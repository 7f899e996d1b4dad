//! Residuals of the optimality inequalities for the interval 2-partition at halving spacings.

use std::f64::consts::PI;
use std::sync::Arc;

use specpart::geometry::{DomainMask, GridSpec};
use specpart::operator::Potential;
use specpart::partition::{check_differential_inequalities, optimize, OptimizeOptions, Seeding};
use specpart::PNorm;

fn main() -> specpart::Result<()> {
    let opts = OptimizeOptions { tol: 1e-12, ..OptimizeOptions::default() };
    let mut prev: Option<f64> = None;
    for n in [64.0, 128.0, 256.0, 512.0] {
        let grid = Arc::new(GridSpec::new(&[0.0], &[PI], PI / n)?);
        let (state, _) = optimize(&DomainMask::full(&grid), &Potential::Zero, 2, PNorm::new(2.0)?, &Seeding::MultiStart, &opts)?;
        let r = check_differential_inequalities(&state)?;
        let ratio = prev.map(|p| format!("{:.3}", p / r.max)).unwrap_or_default();
        println!("h = pi/{n:<4} residual = {:.3e}  discrete = {:.1e}  ratio = {ratio}", r.max, r.max_discrete);
        prev = Some(r.max);
    }
    Ok(())
}
