//! Empirical tail of the normalized LLR against the bounded-difference bound.

use bht::distribution::synthesize_pair;
use bht::montecarlo::{concentration_grid, McConfig};

fn main() -> bht::Result<()> {
    let pair = synthesize_pair(3, 0.3, 0.01, 7)?;
    let config = McConfig::new(200_000, 1);
    println!("D = {:.4}, C_X = {:.4}", pair.divergence(), pair.c_x());
    println!("   n   delta     empirical       bound  pass");
    for n in [10u64, 50, 200] {
        let deltas: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|t| pair.c_x() * (2.0 * t / n as f64).sqrt())
            .collect();
        for c in concentration_grid(&pair, n, &deltas, &config)? {
            println!(
                "{n:>4}  {:.4}  {:.4e}  {:.4e}  {}",
                c.delta, c.empirical.estimate, c.bound, c.pass
            );
        }
    }
    Ok(())
}
