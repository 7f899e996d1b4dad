//! Threshold values for a range of exponents, and the Holder bound `T <= k^(1/p) Sigma`.

use specpart::spectrum::threshold;
use specpart::PNorm;

fn main() -> specpart::Result<()> {
    let (sigma, lambda_prev, k) = (1.0, 0.8, 3);
    println!("{:>6} {:>10} {:>10} {:>6}", "p", "T", "k^(1/p)S", "holds");
    for p in [1.0, 2.0, 4.0, 16.0, f64::INFINITY] {
        let p = if p.is_infinite() { PNorm::INF } else { PNorm::new(p)? };
        let t = threshold(k, p, sigma, lambda_prev).with_energy(0.95, 0.0);
        println!("{:>6} {:>10.5} {:>10.5} {:>6}", p.to_string(), t.threshold, p.holder_factor(k) * sigma, t.holder_bound_holds());
    }
    Ok(())
}
