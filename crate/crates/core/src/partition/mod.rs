//! Partition energies, the alternating minimisation, ring constructions and
//! optimality diagnostics.

mod diffineq;
mod energy;
mod ims;
mod optimize;
mod rings;
mod state;

pub use diffineq::{check_differential_inequalities, interpolant_rayleigh, CellResidual, DiffIneqReport};
pub use energy::{energy_relaxed, energy_strong, EnergyReport};
pub use ims::{cutoff_constant, cutoff_pair, ims_decompose, log_periodic_field, ImsSplit};
pub use optimize::{optimize, optimize_pinf, voronoi_labels, OptimizeOptions, Seeding, DEFAULT_P_SCHEDULE};
pub use rings::{build_ring_partition, build_rings, RingPartition};
pub use state::{check_disjoint, IterationRecord, Labels, PartitionState, StopReason};
