//! Grids, region expressions and domain masks.

mod grid;
mod mask;
mod region;

pub use grid::{GridSpec, MAX_DIM};
pub use mask::{build_mask, check_interleaved, disjoint, ring_union_mask, DomainMask};
pub use region::Region;
