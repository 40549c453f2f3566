//! Seeded simulation of `β_n(ε)` and of the concentration inequality.
//!
//! # Random streams
//!
//! The generator is ChaCha8 (`rand_chacha`). Sample `i` of hypothesis `h` is
//! drawn from the ChaCha stream `(h << 56) | (i / BLOCK)` of the configured
//! seed, at a fixed offset inside that stream. `stream_chunks` only decides
//! how whole blocks are grouped into parallel work items, so outputs are
//! bit-identical for any chunk count and any thread count.
//!
//! Symbols are drawn by inverse-CDF lookup in a cumulative table. Each
//! block's LLR sum is rebuilt from its symbol counts in a fixed order, so
//! two sequences of the same type produce the same `f64` sum.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::HypothesisPair;
use crate::error::{Error, Result};

/// Samples per ChaCha stream.
const BLOCK: u64 = 4096;

/// Default sample count for full-size runs.
pub const REPRODUCTION_SAMPLES: u64 = 2_500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub num_samples: u64,
    pub seed: u64,
    pub stream_chunks: usize,
}

impl McConfig {
    pub fn new(num_samples: u64, seed: u64) -> Self {
        McConfig {
            num_samples,
            seed,
            stream_chunks: 1,
        }
    }

    pub fn with_chunks(mut self, stream_chunks: usize) -> Self {
        self.stream_chunks = stream_chunks.max(1);
        self
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig::new(REPRODUCTION_SAMPLES, 0)
    }
}

/// A proportion estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub num_samples: u64,
}

impl McEstimate {
    pub fn from_count(hits: u64, num_samples: u64) -> Self {
        let estimate = hits as f64 / num_samples as f64;
        McEstimate {
            estimate,
            stderr: (estimate * (1.0 - estimate) / num_samples as f64).sqrt(),
            num_samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    P,
    Q,
}

impl Hypothesis {
    fn tag(self) -> u64 {
        match self {
            Hypothesis::P => 0,
            Hypothesis::Q => 1,
        }
    }
}

/// One simulated block: its LLR sum and a hash identifying the sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Draw {
    llr_sum: f64,
    key: u64,
}

struct Sampler<'a> {
    cdf: Vec<f64>,
    last_symbol: usize,
    llr: &'a [f64],
    n: u64,
}

impl<'a> Sampler<'a> {
    fn new(pair: &'a HypothesisPair, masses: &[f64], n: u64) -> Self {
        let mut acc = 0.0;
        let cdf = masses
            .iter()
            .map(|&x| {
                acc += x;
                acc
            })
            .collect();
        let last_symbol = masses.iter().rposition(|&x| x > 0.0).unwrap_or(0);
        Sampler {
            cdf,
            last_symbol,
            llr: pair.llr(),
            n,
        }
    }

    fn symbol(&self, u: f64) -> usize {
        self.cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.last_symbol)
            .min(self.last_symbol)
    }

    fn draw(&self, rng: &mut ChaCha8Rng, counts: &mut [u32]) -> Draw {
        counts.fill(0);
        let mut key: u64 = 0xcbf2_9ce4_8422_2325;
        for _ in 0..self.n {
            let x = self.symbol(rng.random::<f64>());
            counts[x] += 1;
            key = (key ^ x as u64).wrapping_mul(0x0000_0100_0000_01b3);
        }
        let llr_sum = counts.iter().zip(self.llr).map(|(&k, &l)| k as f64 * l).sum();
        Draw { llr_sum, key }
    }
}

fn sample_draws(pair: &HypothesisPair, n: u64, hypothesis: Hypothesis, config: &McConfig) -> Vec<Draw> {
    let masses = match hypothesis {
        Hypothesis::P => pair.p().masses(),
        Hypothesis::Q => pair.q().masses(),
    };
    let sampler = Sampler::new(pair, masses, n);
    let total = config.num_samples;
    let blocks = total.div_ceil(BLOCK);
    let chunks = (config.stream_chunks.max(1) as u64).min(blocks.max(1));
    let per_chunk = blocks.div_ceil(chunks);
    let m = pair.alphabet_size();

    let parts: Vec<Vec<Draw>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            let mut counts = vec![0u32; m];
            for b in (c * per_chunk)..((c + 1) * per_chunk).min(blocks) {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream((hypothesis.tag() << 56) | b);
                let len = BLOCK.min(total - b * BLOCK);
                out.extend((0..len).map(|_| sampler.draw(&mut rng, &mut counts)));
            }
            out
        })
        .collect();
    parts.concat()
}

/// `num_samples` i.i.d. LLR sums `n·D̂` of length-`n` blocks under `hypothesis`.
pub fn sample_llr_sums(pair: &HypothesisPair, n: u64, hypothesis: Hypothesis, config: &McConfig) -> Vec<f64> {
    sample_draws(pair, n, hypothesis, config)
        .into_iter()
        .map(|d| d.llr_sum)
        .collect()
}

/// Empirical Neyman-Pearson test and its Type II estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEstimate {
    pub estimate: McEstimate,
    /// Plug-in LLR threshold `t̂` (`+inf` when every sample is rejected).
    pub threshold: f64,
    /// Fraction of `P`-samples rejected by the empirical test.
    pub empirical_type1: f64,
    /// Fraction of `Q`-samples in the boundary tie block that were accepted.
    pub boundary_q: f64,
    /// `false` when no `Q`-sample was accepted: the estimate is then only an
    /// upper confidence statement, not a resolved value.
    pub resolved: bool,
}

/// Estimates `β_n(ε)` from simulated `P` and `Q` blocks.
///
/// `t̂` is the lower empirical `ε`-quantile of the `P` sums: with
/// `B = ⌊εN⌋`, `t̂` is the `(B+1)`-th smallest sum, so at most `B` samples lie
/// strictly below it. Samples tied with `t̂` belong to one LLR level. Within
/// that level whole sequences (identified by their hash) are rejected, from
/// the largest hash down, while the count stays within `B`. The resulting
/// deterministic test is applied unchanged to the `Q` samples.
pub fn estimate_beta(pair: &HypothesisPair, n: u64, epsilon: f64, config: &McConfig) -> Result<BetaEstimate> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfDomain {
            name: "epsilon",
            value: epsilon,
        });
    }
    if config.num_samples == 0 {
        return Err(Error::OutOfDomain {
            name: "num_samples",
            value: 0.0,
        });
    }
    let total = config.num_samples;
    let mut p_draws = sample_draws(pair, n, Hypothesis::P, config);
    let q_draws = sample_draws(pair, n, Hypothesis::Q, config);
    let budget = ((epsilon * total as f64).floor() as u64).min(total);
    if budget == total {
        return Ok(BetaEstimate {
            estimate: McEstimate::from_count(0, total),
            threshold: f64::INFINITY,
            empirical_type1: 1.0,
            boundary_q: 0.0,
            resolved: false,
        });
    }

    p_draws.sort_by(|a, b| a.llr_sum.total_cmp(&b.llr_sum));
    let threshold = p_draws[budget as usize].llr_sum;
    let tol = 1e-9 * (n.max(1) as f64);
    let below = p_draws.partition_point(|d| d.llr_sum < threshold - tol) as u64;
    let mut tie_keys: Vec<u64> = p_draws
        .iter()
        .filter(|d| (d.llr_sum - threshold).abs() <= tol)
        .map(|d| d.key)
        .collect();
    tie_keys.sort_unstable_by(|a, b| b.cmp(a));

    // Reject whole key groups from the top while the budget allows.
    let mut remaining = budget - below;
    let mut rejected = 0u64;
    let mut cut = u64::MAX;
    let mut i = 0;
    while i < tie_keys.len() {
        let key = tie_keys[i];
        let run = tie_keys[i..].iter().take_while(|&&k| k == key).count() as u64;
        if run > remaining {
            cut = key;
            break;
        }
        remaining -= run;
        rejected += run;
        i += run as usize;
    }

    let mut accepted = 0u64;
    let mut boundary_accepted = 0u64;
    let mut boundary_total = 0u64;
    for d in &q_draws {
        if d.llr_sum > threshold + tol {
            accepted += 1;
        } else if (d.llr_sum - threshold).abs() <= tol {
            boundary_total += 1;
            if d.key <= cut {
                accepted += 1;
                boundary_accepted += 1;
            }
        }
    }
    Ok(BetaEstimate {
        estimate: McEstimate::from_count(accepted, total),
        threshold,
        empirical_type1: (below + rejected) as f64 / total as f64,
        boundary_q: if boundary_total > 0 {
            boundary_accepted as f64 / boundary_total as f64
        } else {
            0.0
        },
        resolved: accepted > 0,
    })
}

/// Empirical check of `P^n(|D̂ − D| ≥ δ) ≤ exp(−nδ²/(2C_X²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationCheck {
    pub delta: f64,
    pub empirical: McEstimate,
    pub bound: f64,
    pub pass: bool,
    /// `C_X = 0`: the bound is 1 and the check says nothing.
    pub vacuous: bool,
}

/// Tail bound `exp(−nδ²/(2C_X²))`, or 1 when `C_X = 0`.
pub fn concentration_bound(c_x: f64, n: u64, delta: f64) -> f64 {
    if c_x == 0.0 {
        return 1.0;
    }
    (-(n as f64) * delta * delta / (2.0 * c_x * c_x)).exp().min(1.0)
}

pub fn concentration_check(pair: &HypothesisPair, n: u64, delta: f64, config: &McConfig) -> Result<ConcentrationCheck> {
    Ok(concentration_grid(pair, n, &[delta], config)?.remove(0))
}

/// [`concentration_check`] for several `δ` on one shared set of `P` blocks.
pub fn concentration_grid(
    pair: &HypothesisPair,
    n: u64,
    deltas: &[f64],
    config: &McConfig,
) -> Result<Vec<ConcentrationCheck>> {
    if let Some(&bad) = deltas.iter().find(|&&d| !(d > 0.0)) {
        return Err(Error::OutOfDomain {
            name: "delta",
            value: bad,
        });
    }
    if n == 0 || config.num_samples == 0 {
        return Err(Error::OutOfDomain {
            name: "n",
            value: n as f64,
        });
    }
    let d = pair.divergence();
    let nf = n as f64;
    let mut deviations: Vec<f64> = sample_llr_sums(pair, n, Hypothesis::P, config)
        .into_iter()
        .map(|s| (s / nf - d).abs())
        .collect();
    deviations.sort_by(f64::total_cmp);
    let total = config.num_samples;
    Ok(deltas
        .iter()
        .map(|&delta| {
            // Relative slack so that exact ties |D̂ − D| = δ count as tail events.
            let cutoff = delta * (1.0 - 1e-12);
            let hits = (deviations.len() - deviations.partition_point(|&x| x < cutoff)) as u64;
            let empirical = McEstimate::from_count(hits, total);
            let bound = concentration_bound(pair.c_x(), n, delta);
            ConcentrationCheck {
                delta,
                empirical,
                bound,
                pass: empirical.estimate <= bound + 3.0 * empirical.stderr,
                vacuous: pair.c_x() == 0.0,
            }
        })
        .collect())
}
