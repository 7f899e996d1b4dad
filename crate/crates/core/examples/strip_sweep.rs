//! Optimal 2-partition energy of the truncated strip (1, R) x (0, pi) as R grows.

use specpart::oracles::strip_room_energy;
use specpart::scenario::{sweep, ScenarioConfig, SweepAxis};

fn main() -> specpart::Result<()> {
    let mut config = ScenarioConfig::named("strip")?;
    config.example = None;
    config.mode = specpart::scenario::Mode::Solve;
    let table = sweep(&config, SweepAxis::Window, &[8.0, 16.0, 32.0])?;
    print!("{}", table.to_csv());
    for j in [1, 5, 20, 100, 1000] {
        println!("room {j:>4}: {:.6}", strip_room_energy(j));
    }
    Ok(())
}
