//! Half-strip with exactly m bound states: spectrum, Sigma, partition energies and the counting bound.

use specpart::scenario::{execute, HalfStripResult, ScenarioConfig};

fn main() -> specpart::Result<()> {
    let config = ScenarioConfig::named("halfstrip")?;
    let r: HalfStripResult = serde_json::from_value(execute(&config)?.report.result)?;
    println!("ell = {:.4}, width = {:.4}", r.spec.ell, r.spec.width());
    println!("eigenvalues {:.4?} vs oracle {:.4?}", r.eigenvalues, r.oracle);
    println!("count below Sigma - 1e-3: {} (m = {})", r.count, r.m);
    println!("Sigma {:.4} vs {:.4}", r.sigma.sigma, r.sigma_oracle);
    println!("Lambda_k,inf for k = 1..: {:.4?}", r.partition_energies);
    println!("N~_inf = {:?} <= N = {}: {}", r.counting.tilde_inf, r.counting.n, r.counting.pass);
    Ok(())
}
