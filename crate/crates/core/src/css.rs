//! Critical sample size: the first `n` at which the bracket pins `β_n(ε_n)`
//! to within `δ` of `e^{−nD}`, i.e.
//!
//! ```text
//! max{ UB(ε_n) − e^{−nD}, e^{−nD} − LB(ε_n) } ≤ δ
//! ```
//!
//! The criterion is not monotone in `n` at small sizes, so the search is a
//! plain linear scan.

use crate::bounds::{bounds_at_epsilon, Measures};
use crate::distribution::HypothesisPair;
use crate::error::{Error, Result};
use crate::exact::{beta_from_levels, enumerate_levels};
use crate::logvalue::LogValue;
use crate::montecarlo::{estimate_beta, McConfig};
use crate::schedule::{epsilon_at, EpsilonSchedule};

pub const DEFAULT_N_MAX: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CssQuery {
    pub measures: Measures,
    pub schedule: EpsilonSchedule,
    pub delta: f64,
    pub n_max: u64,
    /// Keep `(n, criterion)` for every scanned `n`.
    pub record_series: bool,
}

impl CssQuery {
    pub fn new(measures: Measures, schedule: EpsilonSchedule, delta: f64) -> Self {
        CssQuery {
            measures,
            schedule,
            delta,
            n_max: DEFAULT_N_MAX,
            record_series: false,
        }
    }

    pub fn for_pair(pair: &HypothesisPair, schedule: EpsilonSchedule, delta: f64) -> Self {
        CssQuery::new(Measures::from_pair(pair), schedule, delta)
    }

    pub fn with_n_max(mut self, n_max: u64) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_series(mut self) -> Self {
        self.record_series = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CssResult {
    pub css: u64,
    /// Criterion value at `css`, in linear scale (may underflow to 0).
    pub criterion_at_css: f64,
    pub series: Vec<(u64, LogValue)>,
}

/// `max{UB − e^{−nD}, e^{−nD} − LB}` in the log domain.
pub fn css_criterion(measures: Measures, epsilon: f64, n: u64) -> LogValue {
    let r = bounds_at_epsilon(measures, epsilon, n);
    let center = LogValue::from_ln(-(n as f64) * measures.d);
    // UB ≥ e^{−nD} ≥ LB always holds; a failed subtraction is a rounding tie.
    let upper = r.log_ub.checked_sub(center).unwrap_or(LogValue::ZERO);
    let lower = center.checked_sub(r.log_lb).unwrap_or(LogValue::ZERO);
    upper.max(lower)
}

pub fn predicted_css(query: &CssQuery) -> Result<CssResult> {
    if !(query.delta > 0.0) {
        return Err(Error::OutOfDomain {
            name: "delta",
            value: query.delta,
        });
    }
    if !(query.measures.d > 0.0) {
        return Err(Error::OutOfDomain {
            name: "d",
            value: query.measures.d,
        });
    }
    let ln_delta = query.delta.ln();
    let shortcut = ln_delta - 1e6f64.ln();
    let mut series = Vec::new();
    for n in query.schedule.first_admissible()..=query.n_max {
        let eps = match epsilon_at(&query.schedule, n) {
            Ok(e) => e,
            Err(Error::NotAdmissible { .. }) => continue,
            Err(e) => return Err(e),
        };
        let r = bounds_at_epsilon(query.measures, eps, n);
        // Everything below δ/10⁶ satisfies the criterion without subtracting.
        let criterion = if r.log_ub.ln() < shortcut && -(n as f64) * query.measures.d < shortcut {
            r.log_ub
        } else {
            css_criterion(query.measures, eps, n)
        };
        if query.record_series {
            series.push((n, criterion));
        }
        if criterion.ln() <= ln_delta {
            return Ok(CssResult {
                css: n,
                criterion_at_css: criterion.to_linear(),
                series,
            });
        }
    }
    Err(Error::NotFound { n_max: query.n_max })
}

/// One [`predicted_css`] per `δ = 10^{−k}`.
pub fn css_sweep(base: &CssQuery, k_range: impl IntoIterator<Item = i32>) -> Vec<(f64, Result<CssResult>)> {
    k_range
        .into_iter()
        .map(|k| {
            let delta = 10f64.powi(-k);
            let query = CssQuery { delta, ..base.clone() };
            (delta, predicted_css(&query))
        })
        .collect()
}

/// Source of `β_n(ε_n)` for [`empirical_css`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    Exact,
    MonteCarlo(McConfig),
}

/// First `n` with `|β_n(ε_n) − e^{−nD}| < δ`, where `β_n` comes from the
/// exact enumerator or from simulation.
pub fn empirical_css(
    pair: &HypothesisPair,
    schedule: &EpsilonSchedule,
    delta: f64,
    oracle: Oracle,
    n_max: u64,
) -> Result<CssResult> {
    if !(delta > 0.0) {
        return Err(Error::OutOfDomain {
            name: "delta",
            value: delta,
        });
    }
    let d = pair.divergence();
    let mut series = Vec::new();
    for n in schedule.first_admissible()..=n_max {
        let eps = match epsilon_at(schedule, n) {
            Ok(e) => e,
            Err(Error::NotAdmissible { .. }) => continue,
            Err(e) => return Err(e),
        };
        let beta = match oracle {
            Oracle::Exact => {
                let levels = enumerate_levels(pair, n).map_err(|e| Error::OracleInfeasible(e.to_string()))?;
                beta_from_levels(&levels, eps)?.beta.to_linear()
            }
            Oracle::MonteCarlo(config) => estimate_beta(pair, n, eps, &config)?.estimate.estimate,
        };
        let distance = (beta - (-(n as f64) * d).exp()).abs();
        series.push((n, LogValue::from_linear(distance)));
        if distance < delta {
            return Ok(CssResult {
                css: n,
                criterion_at_css: distance,
                series,
            });
        }
    }
    Err(Error::NotFound { n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{make_pair, DiscreteDistribution};

    fn schedules() -> [EpsilonSchedule; 4] {
        [
            EpsilonSchedule::Constant(0.1),
            EpsilonSchedule::Reciprocal,
            EpsilonSchedule::Power(0.1),
            EpsilonSchedule::LogReciprocal,
        ]
    }

    /// Independent scan straight from the closed-form bracket in linear scale.
    fn scan_oracle(d: f64, c_x: f64, sched: &EpsilonSchedule, delta: f64) -> u64 {
        (1..10_000)
            .find(|&n| {
                let Ok(eps) = epsilon_at(sched, n) else { return false };
                let nf = n as f64;
                let dn = c_x * (2.0 * (1.0 / eps).ln() / nf).sqrt();
                let ub = (-nf * (d - dn)).exp().min(1.0);
                let lb = if 1.0 - eps - dn > 0.0 {
                    (1.0 - eps - dn) * (-nf * (d + dn)).exp()
                } else {
                    0.0
                };
                let c = (-nf * d).exp();
                (ub - c).max(c - lb) <= delta
            })
            .unwrap()
    }

    #[test]
    fn unit_delta_is_first_admissible() {
        for s in schedules() {
            let r = predicted_css(&CssQuery::new(Measures::scalar(0.5, 1.03), s.clone(), 1.0)).unwrap();
            assert_eq!(r.css, s.first_admissible());
        }
    }

    #[test]
    fn high_divergence_constant() {
        let q = CssQuery::new(Measures::scalar(2.5, 2.04), EpsilonSchedule::Constant(0.1), 1e-8);
        assert_eq!(predicted_css(&q).unwrap().css, 14);
    }

    #[test]
    fn low_divergence_power() {
        let q = CssQuery::new(Measures::scalar(0.5, 1.03), EpsilonSchedule::Power(0.1), 1e-8);
        assert_eq!(predicted_css(&q).unwrap().css, 50);
    }

    #[test]
    fn agrees_with_linear_scan() {
        for (d, c) in [(2.5, 2.04), (0.5, 1.03), (1.0, 1.5)] {
            for s in schedules() {
                for k in 1..=8 {
                    let delta = 10f64.powi(-k);
                    let got = predicted_css(&CssQuery::new(Measures::scalar(d, c), s.clone(), delta)).unwrap();
                    assert_eq!(got.css, scan_oracle(d, c, &s, delta), "d={d} c={c} {s} k={k}");
                }
            }
        }
    }

    #[test]
    fn sweep_is_monotone_and_frontier_is_sharp() {
        let base = CssQuery::new(Measures::scalar(0.5, 1.03), EpsilonSchedule::LogReciprocal, 1.0).with_series();
        let sweep = css_sweep(&base, 1..=8);
        let values: Vec<u64> = sweep.iter().map(|(_, r)| r.as_ref().unwrap().css).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "{values:?}");
        for (delta, r) in &sweep {
            let r = r.as_ref().unwrap();
            assert!(r.criterion_at_css <= *delta);
            let (last_n, last) = r.series.last().unwrap();
            assert_eq!(*last_n, r.css);
            assert!(last.to_linear() <= *delta);
            for (n, c) in &r.series[..r.series.len() - 1] {
                assert!(c.ln() > delta.ln(), "n = {n}");
            }
        }
    }

    #[test]
    fn not_found_and_domain() {
        let q = CssQuery::new(Measures::scalar(0.5, 1.03), EpsilonSchedule::Reciprocal, 1e-8).with_n_max(20);
        assert!(matches!(predicted_css(&q), Err(Error::NotFound { n_max: 20 })));
        let q = CssQuery::new(Measures::scalar(0.0, 1.0), EpsilonSchedule::Reciprocal, 1e-3);
        assert!(predicted_css(&q).is_err());
    }

    #[test]
    fn empirical_is_less_conservative() {
        let pair = make_pair(
            DiscreteDistribution::new(vec![0.5, 0.5]).unwrap(),
            DiscreteDistribution::new(vec![0.25, 0.75]).unwrap(),
        )
        .unwrap();
        let sched = EpsilonSchedule::Constant(0.1);
        let predicted = predicted_css(&CssQuery::for_pair(&pair, sched.clone(), 1e-3)).unwrap();
        let empirical = empirical_css(&pair, &sched, 1e-3, Oracle::Exact, 10_000).unwrap();
        assert!(empirical.css <= predicted.css, "{} vs {}", empirical.css, predicted.css);
    }

    #[test]
    fn large_divergence_hits_at_one() {
        let pair = make_pair(
            DiscreteDistribution::new(vec![0.999_999, 0.000_001]).unwrap(),
            DiscreteDistribution::new(vec![0.000_001, 0.999_999]).unwrap(),
        )
        .unwrap();
        let r = empirical_css(&pair, &EpsilonSchedule::Constant(0.1), 1e-3, Oracle::Exact, 10).unwrap();
        assert_eq!(r.css, 1);
    }
}
