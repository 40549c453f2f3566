//! Exact optimal Type II error by grouping sequences into type classes,
//! checked against exhaustive search where that is still possible.

use bht::exact::{beta_bruteforce, beta_exact, enumerate_levels};
use bht::{make_pair, DiscreteDistribution};

fn main() -> bht::Result<()> {
    let pair = make_pair(
        DiscreteDistribution::new(vec![0.5, 0.5])?,
        DiscreteDistribution::new(vec![0.25, 0.75])?,
    )?;

    for level in enumerate_levels(&pair, 2)? {
        println!(
            "llr total {:>8.4}  sequences {}",
            level.llr_total,
            level.sequence_count()
        );
    }

    let r = beta_exact(&pair, 2, 0.3)?;
    let b = beta_bruteforce(&pair, 2, 0.3)?;
    println!(
        "n = 2, eps = 0.3: beta = {} (exhaustive {}), type I {}",
        r.beta, b.beta, r.achieved_type1
    );

    // Larger n: far beyond exhaustive search, cheap by types.
    for n in [50u64, 200, 1000] {
        let r = beta_exact(&pair, n, 0.1)?;
        println!(
            "n = {n:>4}: beta = {}  exponent {:.5}  threshold llr {:.4}",
            r.beta,
            -r.beta.ln() / n as f64,
            r.threshold_llr
        );
    }
    Ok(())
}
