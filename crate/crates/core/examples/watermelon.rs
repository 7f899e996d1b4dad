//! Ball plus sectors for a radial step: a minimal 3-partition at the threshold that is not an equipartition.

use specpart::scenario::{execute, ScenarioConfig, WatermelonResult};

fn main() -> specpart::Result<()> {
    let config = ScenarioConfig::named("watermelon")?;
    let r: WatermelonResult = serde_json::from_value(execute(&config)?.report.result)?;
    println!("ball {:.4} (continuum {:.4}), c = {}", r.ball_lambda, r.ball_oracle, r.c);
    println!("sectors {:.4?}, deviation from c {:.2}%", r.sector_lambdas, 100.0 * r.sector_deviation);
    println!("gap {:.4}, eigenvalues below c: {}", r.gap, r.count_below_c);
    Ok(())
}
