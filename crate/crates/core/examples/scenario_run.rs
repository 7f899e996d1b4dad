//! Runs a scenario file (default: the shipped `stripball` sample) and writes its report.
//!
//! `cargo run --example scenario_run -- path/to/config.toml out_dir`

use std::path::PathBuf;

use specpart::scenario::{run, ScenarioConfig};

fn main() -> specpart::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = match args.next() {
        Some(path) => ScenarioConfig::load(&PathBuf::from(path))?,
        None => ScenarioConfig::named("stripball")?,
    };
    config.out = args.next().map(PathBuf::from);
    let out = run(&config)?;
    println!("{} ({}), input hash {}", out.report.scenario, out.report.mode, out.report.input_hash);
    println!("{}", serde_json::to_string_pretty(&out.report.result)?);
    Ok(())
}
