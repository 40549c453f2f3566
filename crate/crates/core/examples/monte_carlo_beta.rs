//! Seeded simulation of the optimal test next to the exact value.
//! The estimate depends only on the seed, not on the number of chunks.

use bht::exact::beta_exact;
use bht::montecarlo::{estimate_beta, McConfig};
use bht::{make_pair, DiscreteDistribution};

fn main() -> bht::Result<()> {
    let pair = make_pair(
        DiscreteDistribution::new(vec![0.7, 0.3])?,
        DiscreteDistribution::new(vec![0.4, 0.6])?,
    )?;
    for (n, eps) in [(4u64, 0.15), (12, 0.1), (20, 0.25)] {
        let exact = beta_exact(&pair, n, eps)?.beta.to_linear();
        let one = estimate_beta(&pair, n, eps, &McConfig::new(200_000, 9))?;
        let four = estimate_beta(&pair, n, eps, &McConfig::new(200_000, 9).with_chunks(4))?;
        assert_eq!(one, four);
        println!(
            "n = {n:>2}, eps = {eps}: exact {exact:.5}  mc {:.5} ± {:.5}",
            one.estimate.estimate, one.estimate.stderr
        );
    }
    Ok(())
}
