//! Critical sample sizes: the first `n` at which the bracket pins
//! `β_n(ε_n)` to within `δ` of `e^{-nD}`.
//!
//! Runs the closed-form prediction for two scalar regimes, then compares it
//! with the sample size at which the exact optimum itself gets that close.

use bht::css::{css_sweep, empirical_css, predicted_css, CssQuery, Oracle};
use bht::schedule::parse_schedule_list;
use bht::{make_pair, DiscreteDistribution, EpsilonSchedule, Measures};

fn main() -> bht::Result<()> {
    let schedules = parse_schedule_list("const:0.1,recip,pow:0.1,logrecip")?;
    for (d, c_x) in [(2.5, 2.04), (0.5, 1.03)] {
        println!("D = {d}, C_X = {c_x}  (rows: delta = 1e-1 .. 1e-8)");
        for s in &schedules {
            let base = CssQuery::new(Measures::scalar(d, c_x), s.clone(), 1.0);
            let row: Vec<String> = css_sweep(&base, 1..=8)
                .into_iter()
                .map(|(_, r)| r.map(|r| r.css.to_string()).unwrap_or_else(|_| "-".into()))
                .collect();
            println!("  {:<10} {}", s.to_string(), row.join(" "));
        }
    }

    let pair = make_pair(
        DiscreteDistribution::new(vec![0.5, 0.5])?,
        DiscreteDistribution::new(vec![0.25, 0.75])?,
    )?;
    let sched = EpsilonSchedule::Constant(0.1);
    let predicted = predicted_css(&CssQuery::for_pair(&pair, sched.clone(), 1e-3))?;
    let empirical = empirical_css(&pair, &sched, 1e-3, Oracle::Exact, 10_000)?;
    println!(
        "\nbinary pair, const:0.1, delta = 1e-3: predicted {} vs exact {}",
        predicted.css, empirical.css
    );
    Ok(())
}
