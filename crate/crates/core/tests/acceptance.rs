//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bht::bounds::{bounds_at, bounds_at_epsilon, bounds_for_measures, gap, Measures};
use bht::css::{empirical_css, predicted_css, CssQuery, Oracle};
use bht::distribution::{make_pair, synthesize_pair, DiscreteDistribution, HypothesisPair};
use bht::exact::{beta_bruteforce, beta_exact, beta_from_levels, enumerate_levels};
use bht::logvalue::parse_sci_log10;
use bht::montecarlo::{concentration_grid, estimate_beta, McConfig};
use bht::report::{gap_table_csv, parse_range};
use bht::schedule::{epsilon_at, EpsilonSchedule};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

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

fn four_schedules() -> [EpsilonSchedule; 4] {
    [
        EpsilonSchedule::Constant(0.1),
        EpsilonSchedule::Reciprocal,
        EpsilonSchedule::Power(0.1),
        EpsilonSchedule::LogReciprocal,
    ]
}

/// `count` pairs over alphabets of size 2 and 3 with divergences spread over
/// [0.05, 1.5], all drawn from fixed seeds.
fn seeded_pairs(count: usize) -> Vec<HypothesisPair> {
    (0..count)
        .map(|i| {
            let m = 2 + i % 2;
            let d = 0.05 + 1.45 * (i as f64) / (count as f64 - 1.0);
            synthesize_pair(m, d, 0.01, 1000 + i as u64).unwrap()
        })
        .collect()
}

const LN_SLACK: f64 = 1e-9;

fn sandwich() -> Outcome {
    let pairs = seeded_pairs(20);
    let schedules = four_schedules();
    let mut cells = 0;
    let mut violations = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        for n in 1..=200 {
            let levels = enumerate_levels(p, n).unwrap();
            for s in &schedules {
                let Ok(b) = bounds_at(p, s, n) else { continue };
                let beta = beta_from_levels(&levels, b.epsilon_n).unwrap().beta;
                cells += 1;
                if beta.ln() > b.log_ub.ln() + LN_SLACK || beta.ln() < b.log_lb.ln() - LN_SLACK {
                    violations.push(format!("pair {i} {s} n={n}"));
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "{cells} cells, {} violations {:?}",
            violations.len(),
            violations.first()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let pairs = [binary(), pair(&[0.7, 0.3], &[0.4, 0.6]), pair(&[0.9, 0.1], &[0.2, 0.8])];
    let mut cells = 0;
    let mut bad = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        for n in 2..=4 {
            for k in 1..=19 {
                let eps = 0.05 * k as f64;
                let exact = beta_exact(p, n, eps).unwrap();
                let brute = beta_bruteforce(p, n, eps).unwrap().beta.to_linear();
                let b = exact.beta.to_linear();
                let excess = b - brute;
                cells += 1;
                if excess < -1e-12 || excess > exact.boundary_q_per_seq.to_linear() + 1e-12 {
                    bad.push(format!("pair {i} n={n} eps={eps:.2}: exact {b} brute {brute}"));
                }
            }
        }
    }
    let worked = beta_exact(&binary(), 2, 0.3).unwrap();
    let worked_brute = beta_bruteforce(&binary(), 2, 0.3).unwrap();
    let worked_ok = worked.beta.to_linear() == 0.4375 && worked_brute.beta.to_linear() == 0.4375;
    outcome(
        bad.is_empty() && worked_ok,
        format!(
            "{cells} cells, {} out of range, worked example beta = {}",
            bad.len(),
            worked.beta.to_linear()
        ),
    )
}

fn concentration() -> Outcome {
    let pairs = [
        binary(),
        pair(&[0.7, 0.3], &[0.4, 0.6]),
        pair(&[0.2, 0.3, 0.5], &[0.4, 0.4, 0.2]),
        synthesize_pair(3, 0.3, 0.01, 7).unwrap(),
        synthesize_pair(4, 0.8, 0.01, 11).unwrap(),
    ];
    // δ chosen so that the bound equals exp(−t).
    let exponents = [0.25, 0.5, 1.0, 2.0, 3.0, 4.5];
    let config = McConfig::new(1_000_000, 20_240_611);
    let mut cells = 0;
    let mut bad = Vec::new();
    let mut tightest = f64::INFINITY;
    for (i, p) in pairs.iter().enumerate() {
        for n in [10u64, 50, 200] {
            let deltas: Vec<f64> = exponents
                .iter()
                .map(|t| p.c_x() * (2.0 * t / n as f64).sqrt())
                .collect();
            for c in concentration_grid(p, n, &deltas, &config).unwrap() {
                cells += 1;
                let margin = c.bound + 3.0 * c.empirical.stderr - c.empirical.estimate;
                tightest = tightest.min(margin);
                if !c.pass {
                    bad.push(format!("pair {i} n={n} delta={:.4}", c.delta));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{cells} cells, {} failures, smallest margin {tightest:.3e}", bad.len()),
    )
}

fn css_values(measures: Measures) -> Vec<u64> {
    four_schedules()
        .into_iter()
        .map(|s| predicted_css(&CssQuery::new(measures, s, 1e-8)).unwrap().css)
        .collect()
}

fn high_divergence_css() -> Outcome {
    let start = Instant::now();
    let values = css_values(Measures::scalar(2.5, 2.04));
    let elapsed = start.elapsed();
    let pass = values.iter().all(|&v| v <= 16) && values[0] == 14 && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!("css (const, recip, pow, logrecip) = {values:?} in {elapsed:?}"),
    )
}

fn low_divergence_css() -> Outcome {
    let values = css_values(Measures::scalar(0.5, 1.03));
    let pass = values[2] <= 60 && values.iter().all(|&v| v <= 110);
    outcome(pass, format!("css (const, recip, pow, logrecip) = {values:?}"))
}

fn gap_ordering() -> Outcome {
    let mut cells = 0;
    let mut bad = Vec::new();
    for c_x in [0.5, 1.0, 2.0, 3.0] {
        let m = Measures::scalar(1.0, c_x);
        for n in (150..=750).step_by(100) {
            let g = |s: EpsilonSchedule| gap(&bounds_for_measures(m, &s, n).unwrap()).ln();
            let (r, l, p) = (
                g(EpsilonSchedule::Reciprocal),
                g(EpsilonSchedule::LogReciprocal),
                g(EpsilonSchedule::Power(0.1)),
            );
            cells += 1;
            if !(r > l && l > p) {
                bad.push(format!("c_x={c_x} n={n}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{cells} cells, {} out of order {:?}", bad.len(), bad.first()),
    )
}

fn underflow_fidelity() -> Outcome {
    let schedules = [
        EpsilonSchedule::Reciprocal,
        EpsilonSchedule::LogReciprocal,
        EpsilonSchedule::Power(0.1),
    ];
    let mut sub = 0;
    let mut bad = Vec::new();
    for c_x in [0.5, 1.0] {
        let csv = gap_table_csv(
            Measures::scalar(1.0, c_x),
            &schedules,
            &parse_range("150:750:100").unwrap(),
        )
        .unwrap();
        for row in csv.lines().skip(1) {
            let f: Vec<&str> = row.split(',').collect();
            let log10: f64 = f[6].parse().unwrap();
            let printed = f[7];
            if log10 < -308.0 {
                sub += 1;
            }
            let back = parse_sci_log10(printed);
            let ok = printed != "0"
                && back.is_some_and(|b| (b - log10).abs() <= 5e-6 * log10.abs().max(1.0))
                && !printed.starts_with("0.");
            if !ok {
                bad.push(row.to_string());
            }
        }
    }
    outcome(
        sub > 0 && bad.is_empty(),
        format!(
            "{sub} entries below 1e-308, {} bad strings {:?}",
            bad.len(),
            bad.first()
        ),
    )
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let configs: [(HypothesisPair, u64, f64); 10] = [
        (binary(), 2, 0.3),
        (binary(), 5, 0.1),
        (binary(), 10, 0.2),
        (binary(), 20, 0.1),
        (pair(&[0.7, 0.3], &[0.4, 0.6]), 4, 0.15),
        (pair(&[0.7, 0.3], &[0.4, 0.6]), 12, 0.1),
        (pair(&[0.7, 0.3], &[0.4, 0.6]), 20, 0.25),
        (pair(&[0.6, 0.4], &[0.5, 0.5]), 8, 0.05),
        (pair(&[0.6, 0.4], &[0.5, 0.5]), 16, 0.2),
        (pair(&[0.9, 0.1], &[0.6, 0.4]), 15, 0.1),
    ];
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, (p, n, eps)) in configs.iter().enumerate() {
        let exact = beta_exact(p, *n, *eps).unwrap().beta.to_linear();
        let est = estimate_beta(p, *n, *eps, &McConfig::new(100_000, 77 + i as u64)).unwrap();
        let z = (est.estimate.estimate - exact).abs() / est.estimate.stderr;
        worst = worst.max(z);
        if !(z <= 4.0) {
            bad.push(format!(
                "config {i}: exact {exact:.5} mc {:.5} ± {:.5}",
                est.estimate.estimate, est.estimate.stderr
            ));
        }
    }
    let b = binary();
    let sched = EpsilonSchedule::Constant(0.1);
    let predicted = predicted_css(&CssQuery::for_pair(&b, sched.clone(), 1e-3)).unwrap().css;
    let emp_exact = empirical_css(&b, &sched, 1e-3, Oracle::Exact, 10_000).unwrap().css;
    let emp_mc = empirical_css(&b, &sched, 1e-3, Oracle::MonteCarlo(McConfig::new(100_000, 5)), 10_000)
        .unwrap()
        .css;
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && emp_exact <= predicted && emp_mc <= predicted && elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!(
            "worst |z| = {worst:.2}, {} outside 4 stderr; css empirical exact/mc = {emp_exact}/{emp_mc} <= predicted {predicted}; {elapsed:?}",
            bad.len()
        ),
    )
}

/// Ordinary least-squares slope of `y` on `x`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn asymptotic_consistency() -> Outcome {
    let b = binary();
    let d = b.divergence();
    let c_x = b.c_x();
    let sched = EpsilonSchedule::Constant(0.1);
    let mut outside = Vec::new();
    let mut points = Vec::new();
    let mut ratio_range = (f64::INFINITY, 0.0f64);
    for n in 1..=200u64 {
        let eps = epsilon_at(&sched, n).unwrap();
        let exponent = -beta_exact(&b, n, eps).unwrap().beta.ln() / n as f64;
        let r = bounds_at_epsilon(Measures::from_pair(&b), eps, n);
        if exponent < r.exp_lower - 1e-9 || exponent > r.exp_upper + 1e-9 {
            outside.push(n);
        }
        let distance = d - exponent;
        if n >= 10 && distance > 0.0 {
            points.push(((n as f64).ln(), distance.ln()));
            let ratio = distance / ((1.0 / eps).ln() / n as f64).sqrt();
            ratio_range = (ratio_range.0.min(ratio), ratio_range.1.max(ratio));
        }
    }
    let s = slope(&points);
    let slope_ok = (s + 0.5).abs() <= 0.075;
    let scale_ok = ratio_range.1 <= c_x * 2f64.sqrt();
    outcome(
        outside.is_empty() && slope_ok && scale_ok,
        format!(
            "{} n outside [exp_lower, exp_upper]; log-log slope {s:.4} (target -0.5 ± 0.075); distance / sqrt(ln(1/eps)/n) in [{:.3}, {:.3}], limit {:.3}",
            outside.len(),
            ratio_range.0,
            ratio_range.1,
            c_x * 2f64.sqrt()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 sandwich", sandwich),
        ("2 oracle equivalence", oracle_equivalence),
        ("3 concentration", concentration),
        ("4 high-divergence css", high_divergence_css),
        ("5 low-divergence css", low_divergence_css),
        ("6 gap ordering", gap_ordering),
        ("7 underflow fidelity", underflow_fidelity),
        ("8 monte carlo agreement", monte_carlo),
        ("9 asymptotic consistency", asymptotic_consistency),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "acceptance {name}: {verdict} ({:.1}s) {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    }
}
