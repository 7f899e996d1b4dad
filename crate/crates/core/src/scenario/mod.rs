//! Configuration-driven scenarios: the named examples, sweeps, reports and
//! the artifacts written next to them.

mod config;
mod examples;
mod run;
mod sweep;

pub use config::{DomainConfig, ExampleConfig, ImsConfig, ImsField, Mode, RingConfig, ScenarioConfig, SigmaConfig};
pub use examples::{
    halfstrip_config, halfstrip_for_grid, watermelon_cells, HalfStripResult, NoPotentialResult, OracleSolve,
    StripBallResult, StripResult, WatermelonResult, COUNT_OFFSET,
};
pub use run::{
    error_json, execute, exit_code, run, sigma_from_config, solve_partition, Artifact, ImsResult, ImsRow,
    PartitionSummary, PerssonResult, Report, RingResult, RunOutput, SolveResult,
};
pub use sweep::{apply_axis, sweep, sweep_with, SweepAxis, SweepRecord, SweepTable, SWEEP_TOL};
