//! Finite-n bracket on the optimal Type II error and asymptotic references.
//!
//! With `δ_n = C_X·√(2 ln(1/ε_n)/n)` the Type II exponent satisfies
//!
//! ```text
//! D − δ_n  ≤  −(1/n) ln β_n(ε_n)  ≤  D + (1/n) ln(1/(1 − ε_n − δ_n)) + δ_n
//! ```
//!
//! which exponentiates to the feasibility interval
//! `LB = (1 − ε_n − δ_n)·e^{−n(D+δ_n)}` and `UB = e^{−n(D−δ_n)}`.
//! `UB` is clamped to 1 and `LB` to 0 once `1 − ε_n − δ_n ≤ 0`.

use crate::distribution::{nakagawa_exponent, HypothesisPair};
use crate::error::Result;
use crate::logvalue::LogValue;
use crate::normal::inverse_normal_cdf;
use crate::schedule::{epsilon_at, EpsilonSchedule};

/// The two scalars the bracket depends on. Either taken from a pair or
/// supplied directly when only published values are known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub d: f64,
    pub c_x: f64,
}

impl Measures {
    pub fn from_pair(pair: &HypothesisPair) -> Self {
        Measures {
            d: pair.divergence(),
            c_x: pair.c_x(),
        }
    }

    /// Scalar overrides. `c_x < d` cannot come from any real pair; that case
    /// is reported by [`Measures::consistency_warning`] rather than refused.
    pub fn scalar(d: f64, c_x: f64) -> Self {
        Measures { d, c_x }
    }

    pub fn consistency_warning(&self) -> Option<String> {
        (self.c_x < self.d).then(|| {
            format!(
                "C_X = {} is below D = {}; no pair of distributions has these measures",
                self.c_x, self.d
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsResult {
    pub n: u64,
    pub epsilon_n: f64,
    pub delta_n: f64,
    /// `D − δ_n`.
    pub exp_lower: f64,
    /// `D + ln(1/(1−ε_n−δ_n))/n + δ_n`; `+inf` when the lower bound is void.
    pub exp_upper: f64,
    pub log_ub: LogValue,
    pub log_lb: LogValue,
    pub lb_valid: bool,
}

impl BoundsResult {
    pub fn ub(&self) -> LogValue {
        self.log_ub
    }

    pub fn lb(&self) -> LogValue {
        self.log_lb
    }
}

/// `C_X·√(2 ln(1/ε)/n)`.
pub fn delta_n(pair: &HypothesisPair, epsilon: f64, n: u64) -> f64 {
    delta_n_scalar(pair.c_x(), epsilon, n)
}

pub fn delta_n_scalar(c_x: f64, epsilon: f64, n: u64) -> f64 {
    if c_x == 0.0 {
        return 0.0;
    }
    c_x * (2.0 * (1.0 / epsilon).ln() / n as f64).sqrt()
}

pub fn bounds_at(pair: &HypothesisPair, schedule: &EpsilonSchedule, n: u64) -> Result<BoundsResult> {
    bounds_for_measures(Measures::from_pair(pair), schedule, n)
}

/// Same formulas with `(d, c_x)` supplied directly.
pub fn bounds_at_abstract(d: f64, c_x: f64, schedule: &EpsilonSchedule, n: u64) -> Result<BoundsResult> {
    bounds_for_measures(Measures::scalar(d, c_x), schedule, n)
}

pub fn bounds_for_measures(measures: Measures, schedule: &EpsilonSchedule, n: u64) -> Result<BoundsResult> {
    let eps = epsilon_at(schedule, n)?;
    Ok(bounds_at_epsilon(measures, eps, n))
}

/// Evaluates the bracket at an explicit budget `ε ∈ (0, 1)`.
pub fn bounds_at_epsilon(measures: Measures, epsilon: f64, n: u64) -> BoundsResult {
    let nf = n as f64;
    let delta = delta_n_scalar(measures.c_x, epsilon, n);
    let exp_lower = measures.d - delta;
    let log_ub = LogValue::from_ln((-nf * exp_lower).min(0.0));
    let prefactor = 1.0 - epsilon - delta;
    let lb_valid = prefactor > 0.0;
    let (exp_upper, log_lb) = if lb_valid {
        let ln_pref = prefactor.ln();
        (
            measures.d - ln_pref / nf + delta,
            LogValue::from_ln(-nf * (measures.d + delta) + ln_pref),
        )
    } else {
        (f64::INFINITY, LogValue::ZERO)
    };
    BoundsResult {
        n,
        epsilon_n: epsilon,
        delta_n: delta,
        exp_lower,
        exp_upper,
        log_ub,
        log_lb,
        lb_valid,
    }
}

/// `UB − LB` in the log domain; equals `UB` when the lower bound is void.
pub fn gap(result: &BoundsResult) -> LogValue {
    result
        .log_ub
        .checked_sub(result.log_lb)
        // LB ≤ UB holds analytically; rounding at equality is the only way here.
        .unwrap_or(LogValue::ZERO)
}

/// Second-order expansion `D + √(V/n)·Φ⁻¹(ε) + ln n/(2n)` without the
/// `O(1/n)` remainder.
pub fn strassen_exponent(pair: &HypothesisPair, epsilon: f64, n: u64) -> Result<f64> {
    let nf = n as f64;
    let z = inverse_normal_cdf(epsilon)?;
    Ok(pair.divergence() + (pair.dispersion() / nf).sqrt() * z + nf.ln() / (2.0 * nf))
}

/// Stein, Nakagawa and Strassen reference exponents side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTriple {
    pub stein: f64,
    pub nakagawa: f64,
    pub strassen: f64,
}

pub fn exponent_triple(pair: &HypothesisPair, rate: f64, epsilon: f64, n: u64) -> Result<ExponentTriple> {
    Ok(ExponentTriple {
        stein: pair.divergence(),
        nakagawa: nakagawa_exponent(pair, rate)?,
        strassen: strassen_exponent(pair, epsilon, n)?,
    })
}
