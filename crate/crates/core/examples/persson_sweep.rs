//! Bottom of the essential spectrum of a half-strip with a step potential,
//! estimated by removing growing balls.

use specpart::oracles::HalfStripSpec;
use specpart::scenario::{halfstrip_config, halfstrip_for_grid, ScenarioConfig};
use specpart::spectrum::{persson_sweep, sigma_estimate};

fn main() -> specpart::Result<()> {
    let base = ScenarioConfig::named("halfstrip")?;
    let spec: HalfStripSpec = halfstrip_for_grid(1.0, 8.0, 2, base.domain.h)?;
    let config = halfstrip_config(&base, &spec);
    let domain = config.domain.mask()?;
    let sweep = persson_sweep(&domain, &config.potential, &[3.0, 6.0, 9.0, 12.0, 15.0], 1e-10)?;
    print!("{}", sweep.to_csv());
    let sigma = sigma_estimate(&sweep, 1e3)?;
    println!("sigma = {:.5} +- {:.1e}, exact c + 1/l^2 = {:.5}", sigma.sigma, sigma.uncertainty, spec.c + 1.0 / (spec.ell * spec.ell));
    Ok(())
}
