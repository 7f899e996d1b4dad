//! Ground state of a disc written as a binary field dump, read back and hashed.

use std::sync::Arc;

use specpart::geometry::{build_mask, GridSpec, Region};
use specpart::io::{content_hash, eigen_csv, read_field_dump, write_field_dump};
use specpart::operator::{assemble, k_smallest, Potential};

fn main() -> specpart::Result<()> {
    let grid = Arc::new(GridSpec::new(&[-1.0, -1.0], &[1.0, 1.0], 1.0 / 32.0)?);
    let mask = build_mask(&Region::ball(&[0.0, 0.0], 1.0), &grid)?;
    let pairs = k_smallest(&assemble(&mask, &Potential::Zero)?, 3, 1e-10)?;
    print!("{}", eigen_csv(&pairs));
    let mut bytes = Vec::new();
    write_field_dump(&mut bytes, grid.counts(), pairs[0].vector.values())?;
    let back = read_field_dump(&bytes[..])?;
    println!("dump: {} bytes, counts {:?}, roundtrip exact: {}", bytes.len(), back.counts, back.values == pairs[0].vector.values());
    println!("hash {}", content_hash(&bytes));
    Ok(())
}
