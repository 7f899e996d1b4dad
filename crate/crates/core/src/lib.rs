//! Spectral minimal partitions for Schrödinger operators `-Δ + V` with
//! Dirichlet conditions on truncated, possibly unbounded, domains.

pub mod error;
pub mod geometry;
pub mod io;
pub mod operator;
pub mod oracles;
pub mod partition;
pub mod pnorm;
pub mod scenario;
pub mod spectrum;

pub use error::{Error, Result};
pub use pnorm::PNorm;
