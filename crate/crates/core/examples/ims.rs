//! Localisation error of the cutoff splitting for doubling scales; the ratio tends to 4.

use std::sync::Arc;

use specpart::geometry::{DomainMask, GridSpec};
use specpart::operator::{assemble, Potential};
use specpart::partition::{ims_decompose, log_periodic_field};

fn main() -> specpart::Result<()> {
    let grid = Arc::new(GridSpec::new(&[-16.0, -16.0], &[16.0, 16.0], 0.125)?);
    let mask = Arc::new(DomainMask::full(&grid));
    let form = assemble(&mask, &Potential::Zero)?;
    let u = log_periodic_field(mask, 1, 3)?;
    let mut prev: Option<f64> = None;
    for n in [1.0, 2.0, 4.0, 8.0] {
        let split = ims_decompose(&form, &u, n)?;
        let ratio = prev.map(|p| format!("{:.3}", p / split.residual)).unwrap_or_default();
        println!("n = {n:<3} residual = {:.3e}  bound = {:.3e}  ratio = {ratio}", split.residual, split.bound);
        prev = Some(split.residual);
    }
    Ok(())
}
