//! Finite-alphabet distributions and the information measures of a pair.
//!
//! Everything is in nats. A [`HypothesisPair`] caches the per-symbol
//! log-likelihood ratio `ln(p/q)` together with
//!
//! * `d   = Σ p·llr`              (KL divergence `D(P‖Q)`)
//! * `v   = Σ p·(llr − d)²`       (dispersion `V(P‖Q)`)
//! * `c_x = max |llr|` on support (bounded-difference constant)

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::settings::Settings;

/// A validated probability vector over `m >= 2` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    masses: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl DiscreteDistribution {
    /// Validates with the default sum tolerance.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        validate_distribution(&masses, Settings::default().sum_tolerance)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.masses.len() {
            return Err(Error::Model(format!(
                "{} labels for {} symbols",
                labels.len(),
                self.masses.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Renormalizes weights already known to be nonnegative with a positive sum.
    fn from_weights(weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        DiscreteDistribution {
            masses: weights.into_iter().map(|w| w / sum).collect(),
            labels: None,
        }
    }
}

/// Checks nonnegativity, alphabet size and the sum, then divides by the sum.
pub fn validate_distribution(masses: &[f64], tolerance: f64) -> Result<DiscreteDistribution> {
    if masses.len() < 2 {
        return Err(Error::AlphabetTooSmall { size: masses.len() });
    }
    for (index, &value) in masses.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeMass { index, value });
        }
    }
    let sum: f64 = masses.iter().sum();
    if (sum - 1.0).abs() > tolerance {
        return Err(Error::SumOutOfTolerance { sum, tolerance });
    }
    Ok(DiscreteDistribution {
        masses: masses.iter().map(|&x| x / sum).collect(),
        labels: None,
    })
}

/// `D(a‖b)` in nats over the support of `a`. Assumes `b > 0` wherever `a > 0`.
pub fn kl_divergence(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &y)| x * (x / y).ln())
        .sum()
}

/// Null `P` and alternative `Q` with cached information measures.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisPair {
    p: DiscreteDistribution,
    q: DiscreteDistribution,
    llr: Vec<f64>,
    d: f64,
    v: f64,
    c_x: f64,
}

impl HypothesisPair {
    pub fn p(&self) -> &DiscreteDistribution {
        &self.p
    }

    pub fn q(&self) -> &DiscreteDistribution {
        &self.q
    }

    /// Per-symbol `ln(p/q)`; zero off the common support.
    pub fn llr(&self) -> &[f64] {
        &self.llr
    }

    pub fn divergence(&self) -> f64 {
        self.d
    }

    pub fn dispersion(&self) -> f64 {
        self.v
    }

    pub fn c_x(&self) -> f64 {
        self.c_x
    }

    pub fn alphabet_size(&self) -> usize {
        self.p.len()
    }

    /// `D(Q‖P)`, the largest rate accepted by [`solve_tilt_rate`].
    pub fn reverse_divergence(&self) -> f64 {
        kl_divergence(self.q.masses(), self.p.masses())
    }

    /// Symbols with positive mass (identical under both hypotheses).
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.p
            .masses()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(i, _)| i)
    }
}

/// Builds a pair, requiring equal alphabets and identical supports.
pub fn make_pair(p: DiscreteDistribution, q: DiscreteDistribution) -> Result<HypothesisPair> {
    if p.len() != q.len() {
        return Err(Error::AlphabetSizeMismatch { p: p.len(), q: q.len() });
    }
    for (index, (&a, &b)) in p.masses().iter().zip(q.masses()).enumerate() {
        if (a > 0.0) != (b > 0.0) {
            return Err(Error::SupportMismatch { index, p: a, q: b });
        }
    }
    let llr: Vec<f64> = p
        .masses()
        .iter()
        .zip(q.masses())
        .map(|(&a, &b)| if a > 0.0 { (a / b).ln() } else { 0.0 })
        .collect();
    let d: f64 = p.masses().iter().zip(&llr).map(|(&a, &l)| a * l).sum();
    let v: f64 = p.masses().iter().zip(&llr).map(|(&a, &l)| a * (l - d).powi(2)).sum();
    let c_x = p
        .masses()
        .iter()
        .zip(&llr)
        .filter(|(&a, _)| a > 0.0)
        .map(|(_, &l)| l.abs())
        .fold(0.0, f64::max);
    Ok(HypothesisPair {
        p,
        q,
        // Rounding can leave d a hair below zero for p == q.
        d: d.max(0.0),
        v,
        c_x,
        llr,
    })
}

/// Geometric mixture `P_t ∝ P^{1−t} Q^t`.
pub fn tilted(pair: &HypothesisPair, t: f64) -> Result<DiscreteDistribution> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TiltOutOfRange(t));
    }
    if t == 0.0 {
        return Ok(pair.p.clone());
    }
    if t == 1.0 {
        return Ok(pair.q.clone());
    }
    let weights = pair
        .p
        .masses()
        .iter()
        .zip(pair.q.masses())
        .map(|(&a, &b)| if a > 0.0 { a.powf(1.0 - t) * b.powf(t) } else { 0.0 })
        .collect();
    Ok(DiscreteDistribution::from_weights(weights))
}

/// `t ↦ D(P_t‖P)`, nondecreasing on `[0, 1]`.
pub fn tilt_rate(pair: &HypothesisPair, t: f64) -> Result<f64> {
    Ok(kl_divergence(tilted(pair, t)?.masses(), pair.p.masses()))
}

/// Solves `D(P_t‖P) = r` for `t ∈ [0, 1]` by bisection.
pub fn solve_tilt_rate(pair: &HypothesisPair, r: f64) -> Result<f64> {
    solve_tilt_rate_with(pair, r, &Settings::default())
}

pub fn solve_tilt_rate_with(pair: &HypothesisPair, r: f64, settings: &Settings) -> Result<f64> {
    let max = pair.reverse_divergence();
    let tol = settings.bisection_tolerance;
    if !(r >= 0.0) || r > max + tol {
        return Err(Error::RateOutOfRange { rate: r, min: 0.0, max });
    }
    if r <= tol {
        return Ok(0.0);
    }
    if r >= max - tol {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // Bisect to machine width; the residual contract is implied.
        if tilt_rate(pair, mid)? < r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Type II exponent `D(P_{t*}‖Q)` under an exponential Type I budget `e^{−rn}`.
pub fn nakagawa_exponent(pair: &HypothesisPair, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < pair.d) {
        return Err(Error::RateOutOfRange {
            rate: r,
            min: 0.0,
            max: pair.d,
        });
    }
    let t = solve_tilt_rate(pair, r)?;
    Ok(kl_divergence(tilted(pair, t)?.masses(), pair.q.masses()))
}

const SYNTH_ATTEMPTS: u64 = 16;

/// Draws a seeded pair with full support, every mass at least `min_mass`, and
/// `D(P‖Q)` within `1e-6` of `target_d`.
///
/// A random anchor `(P, Q₀)` is drawn and `Q_λ = (1−λ)P + λQ₀` is bisected on
/// `λ`. `D(P‖Q_λ)` is convex in `λ` with zero slope at `λ = 0`, hence
/// nondecreasing. Later attempts draw spikier anchors.
pub fn synthesize_pair(m: usize, target_d: f64, min_mass: f64, seed: u64) -> Result<HypothesisPair> {
    if m < 2 {
        return Err(Error::AlphabetTooSmall { size: m });
    }
    if !(min_mass >= 0.0) || min_mass * m as f64 >= 1.0 {
        return Err(Error::OutOfDomain {
            name: "min_mass",
            value: min_mass,
        });
    }
    if !(target_d >= 0.0) || !target_d.is_finite() {
        return Err(Error::OutOfDomain {
            name: "target_d",
            value: target_d,
        });
    }
    let mut best = 0.0f64;
    for attempt in 0..SYNTH_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let spike = 1.0 + attempt as f64;
        let p = floored_dirichlet(&mut rng, m, min_mass, 1.0);
        let q0 = floored_dirichlet(&mut rng, m, min_mass, spike);
        let reachable = kl_divergence(&p, &q0);
        best = best.max(reachable);
        if reachable < target_d {
            continue;
        }
        let lambda = bisect_mixture(&p, &q0, target_d);
        let q: Vec<f64> = p
            .iter()
            .zip(&q0)
            .map(|(&a, &b)| (1.0 - lambda) * a + lambda * b)
            .collect();
        let pair = make_pair(
            DiscreteDistribution::from_weights(p),
            DiscreteDistribution::from_weights(q),
        )?;
        if (pair.d - target_d).abs() <= 1e-6 {
            return Ok(pair);
        }
    }
    Err(Error::TargetUnreachable {
        target: target_d,
        reachable: best,
    })
}

/// Random weights `u^spike` (with `u` exponential) shifted to respect the floor.
fn floored_dirichlet(rng: &mut ChaCha8Rng, m: usize, min_mass: f64, spike: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..m)
        .map(|_| {
            let u: f64 = rng.random::<f64>();
            (-(1.0 - u).ln()).powf(spike)
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    let free = 1.0 - min_mass * m as f64;
    raw.iter().map(|w| min_mass + free * w / sum).collect()
}

fn bisect_mixture(p: &[f64], q0: &[f64], target: f64) -> f64 {
    let divergence = |lambda: f64| {
        let q: Vec<f64> = p
            .iter()
            .zip(q0)
            .map(|(&a, &b)| (1.0 - lambda) * a + lambda * b)
            .collect();
        kl_divergence(p, &q)
    };
    if target <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = divergence(mid);
        if (f - target).abs() <= 1e-10 {
            return mid;
        }
        if f < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// On-disk model: `{"labels": [...], "p": [...], "q": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl ModelFile {
    pub fn from_pair(pair: &HypothesisPair) -> Self {
        ModelFile {
            labels: pair.p.labels.clone(),
            p: pair.p.masses.clone(),
            q: pair.q.masses.clone(),
        }
    }

    pub fn into_pair(self) -> Result<HypothesisPair> {
        let tol = Settings::default().sum_tolerance;
        let mut p = validate_distribution(&self.p, tol)?;
        let mut q = validate_distribution(&self.q, tol)?;
        if let Some(labels) = self.labels {
            p = p.with_labels(labels.clone())?;
            q = q.with_labels(labels)?;
        }
        make_pair(p, q)
    }

    pub fn parse(text: &str) -> Result<HypothesisPair> {
        let model: ModelFile = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        model.into_pair()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}
