//! Exact optimal Type II error for small alphabets.
//!
//! All sequences of one type class (symbol-count vector) share the same
//! probability under any i.i.d. law and the same LLR total, so the
//! Neyman-Pearson acceptance region can be assembled from type classes
//! instead of from the `m^n` individual sequences. Classes are grouped into
//! levels of equal LLR total and the region is filled greedily from the
//! highest level down until its `P`-mass reaches `1 − ε`. The boundary level
//! is entered at single-sequence granularity, so the test stays
//! deterministic.
//!
//! [`beta_bruteforce`] minimizes over every subset of `X^n` and serves as an
//! independent oracle for tiny instances.

use crate::distribution::HypothesisPair;
use crate::error::{Error, Result};
use crate::logvalue::LogValue;
use crate::settings::Settings;

/// One type class: `sequence_count` sequences, each with the given masses.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeGroup {
    /// Symbol counts over the full alphabet (zero off the support).
    pub counts: Vec<u32>,
    /// `ln` of the multinomial coefficient.
    pub ln_count: f64,
    pub log_p_per_seq: LogValue,
    pub log_q_per_seq: LogValue,
}

impl TypeGroup {
    /// Number of sequences in the class, rounded to an integer while it is
    /// exactly representable.
    pub fn sequence_count(&self) -> f64 {
        let c = self.ln_count.exp();
        if c < 9.0e15 {
            c.round()
        } else {
            c
        }
    }

    pub fn log_p_mass(&self) -> LogValue {
        self.log_p_per_seq.scale_ln(self.ln_count)
    }

    pub fn log_q_mass(&self) -> LogValue {
        self.log_q_per_seq.scale_ln(self.ln_count)
    }
}

/// All type classes sharing one LLR total.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrLevel {
    /// `Σ_i ln(p(x_i)/q(x_i))` for any sequence at this level.
    pub llr_total: f64,
    /// Sorted by ascending per-sequence `P`-mass, then by count vector.
    pub groups: Vec<TypeGroup>,
}

impl LlrLevel {
    pub fn p_mass(&self) -> f64 {
        self.groups.iter().map(|g| g.log_p_mass().to_linear()).sum()
    }

    pub fn log_q_mass(&self) -> LogValue {
        self.groups.iter().map(TypeGroup::log_q_mass).sum()
    }

    pub fn sequence_count(&self) -> f64 {
        self.groups.iter().map(TypeGroup::sequence_count).sum()
    }
}

/// Outcome of an optimal deterministic test at budget `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpResult {
    /// `Q^n` of the acceptance region.
    pub beta: LogValue,
    /// `P^n` of the rejection region; never above the budget.
    pub achieved_type1: f64,
    /// LLR total of the boundary level (`+inf` if everything is rejected).
    pub threshold_llr: f64,
    /// Accepted share of the boundary level's sequences.
    pub boundary_fraction: f64,
    /// Per-sequence `Q`-mass of the last group entered at the boundary.
    pub boundary_q_per_seq: LogValue,
    /// `Q^n(LLR ≥ threshold)`: the boundary level taken whole.
    pub beta_threshold: LogValue,
    /// `P^n(LLR < threshold)`, the Type I error of the threshold-only test.
    pub type1_threshold: f64,
}

/// Number of type classes `C(n + k − 1, k − 1)` for a support of size `k`.
pub fn type_class_count(n: u64, k: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        // c * (n + i) / i stays integral at every step.
        c = match c.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    c
}

pub fn enumerate_levels(pair: &HypothesisPair, n: u64) -> Result<Vec<LlrLevel>> {
    enumerate_levels_with(pair, n, &Settings::default())
}

/// Enumerates type classes and merges them into levels sorted by
/// descending LLR total.
pub fn enumerate_levels_with(pair: &HypothesisPair, n: u64, settings: &Settings) -> Result<Vec<LlrLevel>> {
    let support: Vec<usize> = pair.support().collect();
    let types = type_class_count(n, support.len());
    if types > settings.enumeration_cap {
        return Err(Error::EnumerationTooLarge {
            types,
            cap: settings.enumeration_cap,
        });
    }
    let m = pair.alphabet_size();
    let ln_fact = ln_factorials(n as usize);
    let ln_p: Vec<f64> = pair.p().masses().iter().map(|x| x.ln()).collect();
    let ln_q: Vec<f64> = pair.q().masses().iter().map(|x| x.ln()).collect();
    let llr = pair.llr();

    let mut entries: Vec<(f64, TypeGroup)> = Vec::with_capacity(types as usize);
    let mut counts = vec![0u32; m];
    visit_compositions(&support, n as u32, 0, &mut counts, &mut |c| {
        let mut ln_count = ln_fact[n as usize];
        let (mut lp, mut lq, mut total) = (0.0, 0.0, 0.0);
        for &s in &support {
            let k = c[s];
            ln_count -= ln_fact[k as usize];
            if k > 0 {
                let kf = k as f64;
                lp += kf * ln_p[s];
                lq += kf * ln_q[s];
                total += kf * llr[s];
            }
        }
        entries.push((
            total,
            TypeGroup {
                counts: c.to_vec(),
                ln_count,
                log_p_per_seq: LogValue::from_ln(lp),
                log_q_per_seq: LogValue::from_ln(lq),
            },
        ));
    });

    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.counts.cmp(&b.1.counts)));
    let merge = settings.level_merge_tolerance * (n.max(1) as f64);
    let mut levels: Vec<LlrLevel> = Vec::new();
    for (total, group) in entries {
        match levels.last_mut() {
            Some(level) if (level.llr_total - total).abs() <= merge => level.groups.push(group),
            _ => levels.push(LlrLevel {
                llr_total: total,
                groups: vec![group],
            }),
        }
    }
    for level in &mut levels {
        level.groups.sort_by(|a, b| {
            a.log_p_per_seq
                .ln()
                .total_cmp(&b.log_p_per_seq.ln())
                .then_with(|| a.counts.cmp(&b.counts))
        });
    }
    Ok(levels)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Calls `f` once per count vector over `support` summing to `remaining`.
fn visit_compositions(support: &[usize], remaining: u32, pos: usize, counts: &mut [u32], f: &mut impl FnMut(&[u32])) {
    let s = support[pos];
    if pos + 1 == support.len() {
        counts[s] = remaining;
        f(counts);
        return;
    }
    for k in (0..=remaining).rev() {
        counts[s] = k;
        visit_compositions(support, remaining - k, pos + 1, counts, f);
    }
    counts[s] = 0;
}

/// Optimal deterministic test at budget `ε ∈ [0, 1]`.
pub fn beta_exact(pair: &HypothesisPair, n: u64, epsilon: f64) -> Result<NpResult> {
    let levels = enumerate_levels(pair, n)?;
    beta_from_levels(&levels, epsilon)
}

/// [`beta_exact`] on levels that were already enumerated, so several budgets
/// can share one enumeration.
pub fn beta_from_levels(levels: &[LlrLevel], epsilon: f64) -> Result<NpResult> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfDomain {
            name: "epsilon",
            value: epsilon,
        });
    }
    // Reject whole levels from the bottom while the budget allows. Type I
    // mass is accumulated from the small end, where it is tiny.
    let slack = epsilon * (1.0 + 1e-12);
    let mut rejected = 0.0f64;
    let mut idx = levels.len();
    while idx > 0 {
        let mass = levels[idx - 1].p_mass();
        if rejected + mass <= slack {
            rejected += mass;
            idx -= 1;
        } else {
            break;
        }
    }
    if idx == 0 {
        return Ok(NpResult {
            beta: LogValue::ZERO,
            achieved_type1: rejected.min(1.0),
            threshold_llr: f64::INFINITY,
            boundary_fraction: 0.0,
            boundary_q_per_seq: LogValue::ZERO,
            beta_threshold: LogValue::ZERO,
            type1_threshold: rejected.min(1.0),
        });
    }

    let above: LogValue = levels[..idx - 1].iter().map(LlrLevel::log_q_mass).sum();
    let boundary = &levels[idx - 1];
    let level_mass = boundary.p_mass();
    let budget = (epsilon - rejected).max(0.0);
    let mut need = level_mass - budget;

    let mut accepted_p = 0.0f64;
    let mut accepted_seqs = 0.0f64;
    let mut taken_q = LogValue::ZERO;
    let mut last_q = LogValue::ZERO;
    for group in &boundary.groups {
        if need <= 0.0 {
            break;
        }
        let p_seq = group.log_p_per_seq.to_linear();
        let count = group.sequence_count();
        let group_mass = group.log_p_mass().to_linear();
        last_q = group.log_q_per_seq;
        if group_mass < need {
            accepted_p += group_mass;
            accepted_seqs += count;
            taken_q = taken_q + group.log_q_mass();
            need -= group_mass;
        } else {
            let k = (need / p_seq - 1e-9).ceil().clamp(0.0, count);
            accepted_p += k * p_seq;
            accepted_seqs += k;
            if k > 0.0 {
                taken_q = taken_q + group.log_q_per_seq.scale_ln(k.ln());
            }
            break;
        }
    }

    let total_seqs = boundary.sequence_count();
    Ok(NpResult {
        beta: above + taken_q,
        achieved_type1: (rejected + (level_mass - accepted_p).max(0.0)).clamp(0.0, 1.0),
        threshold_llr: boundary.llr_total,
        boundary_fraction: if total_seqs > 0.0 {
            accepted_seqs / total_seqs
        } else {
            0.0
        },
        boundary_q_per_seq: last_q,
        beta_threshold: above + boundary.log_q_mass(),
        type1_threshold: rejected,
    })
}

/// Largest number of sequences [`beta_bruteforce`] will enumerate subsets of.
pub const BRUTEFORCE_LIMIT: u128 = 20;

/// Minimum of `Q^n(A)` over every `A ⊆ X^n` with `P^n(Aᶜ) ≤ ε`.
pub fn beta_bruteforce(pair: &HypothesisPair, n: u64, epsilon: f64) -> Result<NpResult> {
    let m = pair.alphabet_size() as u128;
    let sequences = m.checked_pow(n as u32).unwrap_or(u128::MAX);
    if sequences > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            sequences,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let s = sequences as usize;
    let (p, q) = (pair.p().masses(), pair.q().masses());
    let mut pm = vec![1.0f64; s];
    let mut qm = vec![1.0f64; s];
    let mut llr = vec![0.0f64; s];
    for idx in 0..s {
        let mut rest = idx;
        for _ in 0..n {
            let x = rest % m as usize;
            rest /= m as usize;
            pm[idx] *= p[x];
            qm[idx] *= q[x];
            llr[idx] += pair.llr()[x];
        }
    }
    let tol = 1e-12;
    let mut best: Option<(f64, f64, u32)> = None;
    for mask in 0u32..(1u32 << s) {
        let (mut rejected_p, mut accepted_q) = (0.0, 0.0);
        for i in 0..s {
            if mask >> i & 1 == 1 {
                accepted_q += qm[i];
            } else {
                rejected_p += pm[i];
            }
        }
        if rejected_p <= epsilon + tol && best.is_none_or(|(bq, _, _)| accepted_q < bq) {
            best = Some((accepted_q, rejected_p, mask));
        }
    }
    let (beta, type1, mask) = best.expect("accepting everything is always feasible");
    let threshold = (0..s)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| llr[i])
        .fold(f64::INFINITY, f64::min);
    Ok(NpResult {
        beta: LogValue::from_linear(beta),
        achieved_type1: type1,
        threshold_llr: threshold,
        boundary_fraction: 1.0,
        boundary_q_per_seq: LogValue::ZERO,
        beta_threshold: LogValue::from_linear(beta),
        type1_threshold: type1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{make_pair, DiscreteDistribution};
    use proptest::prelude::*;

    fn pair(p: &[f64], q: &[f64]) -> HypothesisPair {
        make_pair(
            DiscreteDistribution::new(p.to_vec()).unwrap(),
            DiscreteDistribution::new(q.to_vec()).unwrap(),
        )
        .unwrap()
    }

    fn binary() -> HypothesisPair {
        pair(&[0.5, 0.5], &[0.25, 0.75])
    }

    #[test]
    fn binary_n2_levels() {
        let levels = enumerate_levels(&binary(), 2).unwrap();
        let totals: Vec<f64> = levels.iter().map(|l| l.llr_total).collect();
        let counts: Vec<f64> = levels.iter().map(LlrLevel::sequence_count).collect();
        assert_eq!(counts, vec![1.0, 2.0, 1.0]);
        let expected = [4f64.ln(), (4.0f64 / 3.0).ln(), (4.0f64 / 9.0).ln()];
        for (a, b) in totals.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(counts.iter().sum::<f64>(), 4.0);
    }

    #[test]
    fn identical_pair_has_one_level() {
        let p = pair(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]);
        let levels = enumerate_levels(&p, 6).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].llr_total, 0.0);
        assert_eq!(levels[0].groups.len() as u128, type_class_count(6, 3));
    }

    #[test]
    fn worked_example() {
        let r = beta_exact(&binary(), 2, 0.3).unwrap();
        assert!((r.beta.to_linear() - 0.4375).abs() < 1e-15);
        assert!((r.achieved_type1 - 0.25).abs() < 1e-15);
        assert!((r.threshold_llr - (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert_eq!(r.boundary_fraction, 1.0);
        let b = beta_bruteforce(&binary(), 2, 0.3).unwrap();
        assert!((b.beta.to_linear() - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn partial_boundary_level() {
        // n = 2, ε = 0.3 budget already spent on {11}; ε = 0.5 frees one
        // of the two middle sequences.
        let r = beta_exact(&binary(), 2, 0.5).unwrap();
        assert!((r.beta.to_linear() - (0.0625 + 0.1875)).abs() < 1e-15);
        assert!((r.achieved_type1 - 0.5).abs() < 1e-15);
        assert_eq!(r.boundary_fraction, 0.5);
        assert!((r.beta_threshold.to_linear() - 0.4375).abs() < 1e-15);
        assert!((r.type1_threshold - 0.25).abs() < 1e-15);
    }

    #[test]
    fn budget_extremes() {
        let r = beta_exact(&binary(), 5, 1.0).unwrap();
        assert!(r.beta.is_zero());
        assert!((r.achieved_type1 - 1.0).abs() < 1e-12);
        let r = beta_exact(&binary(), 5, 0.0).unwrap();
        assert!((r.beta.to_linear() - 1.0).abs() < 1e-12);
        assert_eq!(r.achieved_type1, 0.0);
        let r = beta_exact(&pair(&[0.2, 0.3, 0.5], &[0.5, 0.3, 0.2]), 40, 0.0).unwrap();
        assert!((r.beta.to_linear() - 1.0).abs() < 1e-12);
        assert!(beta_exact(&binary(), 3, 1.5).is_err());
    }

    #[test]
    fn bruteforce_identical_pair() {
        let p = pair(&[0.5, 0.5], &[0.5, 0.5]);
        let r = beta_bruteforce(&p, 2, 0.3).unwrap();
        assert!((r.beta.to_linear() - 0.75).abs() < 1e-15);
        assert!(beta_bruteforce(&p, 2, 1.0).unwrap().beta.to_linear() == 0.0);
        assert!(matches!(beta_bruteforce(&p, 5, 0.1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn mass_conservation() {
        let p = pair(&[0.1, 0.2, 0.3, 0.4], &[0.4, 0.3, 0.2, 0.1]);
        let levels = enumerate_levels(&p, 30).unwrap();
        let p_total: f64 = levels.iter().map(LlrLevel::p_mass).sum();
        let q_total: LogValue = levels.iter().map(LlrLevel::log_q_mass).sum();
        assert!((p_total - 1.0).abs() < 1e-9);
        assert!((q_total.to_linear() - 1.0).abs() < 1e-9);
        for level in &levels {
            for g in &level.groups {
                let implied = g.log_p_per_seq.ln() - g.log_q_per_seq.ln();
                assert!((implied - level.llr_total).abs() <= 1e-9 * 30.0);
            }
        }
    }

    #[test]
    fn symmetric_pair_merges_levels() {
        // Symbols 0 and 2 carry opposite LLRs, so distinct types collide.
        let p = pair(&[0.4, 0.2, 0.4], &[0.2, 0.6, 0.2]);
        let levels = enumerate_levels(&p, 4).unwrap();
        assert!(levels.iter().any(|l| l.groups.len() > 1));
        for w in levels.windows(2) {
            assert!(w[0].llr_total > w[1].llr_total);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let settings = Settings {
            enumeration_cap: 100,
            ..Settings::default()
        };
        let p = pair(&[0.2, 0.3, 0.5], &[0.5, 0.3, 0.2]);
        assert!(matches!(
            enumerate_levels_with(&p, 50, &settings),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert_eq!(type_class_count(200, 3), 20_301);
        assert_eq!(type_class_count(2, 2), 3);
    }

    fn arb_small_pair() -> impl Strategy<Value = HypothesisPair> {
        (
            prop::collection::vec(0.05f64..1.0, 2),
            prop::collection::vec(0.05f64..1.0, 2),
        )
            .prop_map(|(a, b)| {
                let sa: f64 = a.iter().sum();
                let sb: f64 = b.iter().sum();
                pair(&[a[0] / sa, a[1] / sa], &[b[0] / sb, b[1] / sb])
            })
    }

    proptest! {
        #[test]
        fn greedy_within_one_sequence_of_optimum(p in arb_small_pair(), n in 1u64..5, eps in 0.0f64..1.0) {
            let exact = beta_exact(&p, n, eps).unwrap();
            let brute = beta_bruteforce(&p, n, eps).unwrap();
            let (e, b) = (exact.beta.to_linear(), brute.beta.to_linear());
            prop_assert!(e >= b - 1e-12);
            prop_assert!(e - b <= exact.boundary_q_per_seq.to_linear() + 1e-12);
            prop_assert!(exact.achieved_type1 <= eps + 1e-12);
        }

        #[test]
        fn beta_nonincreasing_in_budget(p in arb_small_pair(), n in 1u64..40, e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let levels = enumerate_levels(&p, n).unwrap();
            let a = beta_from_levels(&levels, lo).unwrap();
            let b = beta_from_levels(&levels, hi).unwrap();
            prop_assert!(b.beta.ln() <= a.beta.ln() + 1e-12);
            // Dropping the boundary level would overspend the budget.
            if a.threshold_llr.is_finite() {
                let idx = levels.iter().position(|l| l.llr_total == a.threshold_llr).unwrap();
                let below: f64 = levels[idx..].iter().map(LlrLevel::p_mass).sum();
                prop_assert!(below > lo);
                prop_assert!(a.type1_threshold <= lo + 1e-12);
            }
        }
    }
}
