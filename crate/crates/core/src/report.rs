//! CSV and JSON renderers for sweeps and oracle runs.
//!
//! Floating-point fields use six significant digits in scientific notation.
//! Every probability also gets a `log10_*` column printed with the shortest
//! representation that round-trips, and probabilities themselves are printed
//! from that logarithm, so values below `1e-308` never flush to zero.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::{bounds_for_measures, gap, Measures};
use crate::css::CssResult;
use crate::error::{Error, Result};
use crate::exact::NpResult;
use crate::logvalue::{format_sci, LogValue};
use crate::montecarlo::{BetaEstimate, McConfig};
use crate::schedule::EpsilonSchedule;

pub const BOUNDS_HEADER: &str = "n,epsilon_n,delta_n,exp_lower,exp_upper,log10_LB,log10_UB,log10_gap,lb_valid";
pub const GAP_HEADER: &str = "schedule,n,epsilon_n,delta_n,log10_UB,log10_LB,log10_gap,gap";
pub const CSS_HEADER: &str = "schedule,delta,css,criterion_at_css";

/// Six significant digits, e.g. `1.09444e0`.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else {
        format!("{x}")
    }
}

/// Shortest round-trip form; exponent notation for tiny magnitudes.
fn log10_field(v: LogValue) -> String {
    let x = v.log10();
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Parses `start:end:step` (inclusive), `a,b,c`, or a single integer.
pub fn parse_range(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::OutOfDomain {
        name: "range",
        value: f64::NAN,
    };
    let parse = |x: &str| x.trim().parse::<u64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let out: Vec<u64> = match parts.as_slice() {
        [single] => single.split(',').map(parse).collect::<Result<_>>()?,
        [a, b] => (parse(a)?..=parse(b)?).collect(),
        [a, b, step] => {
            let step = parse(step)?;
            if step == 0 {
                return Err(bad());
            }
            (parse(a)?..=parse(b)?).step_by(step as usize).collect()
        }
        _ => return Err(bad()),
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Bounds sweep over `ns`; inadmissible `n` are skipped.
pub fn bounds_csv(measures: Measures, schedule: &EpsilonSchedule, ns: &[u64]) -> Result<String> {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for &n in ns {
        let r = match bounds_for_measures(measures, schedule, n) {
            Ok(r) => r,
            Err(Error::NotAdmissible { .. }) => continue,
            Err(e) => return Err(e),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            sci(r.epsilon_n),
            sci(r.delta_n),
            sci(r.exp_lower),
            sci(r.exp_upper),
            log10_field(r.log_lb),
            log10_field(r.log_ub),
            log10_field(gap(&r)),
            r.lb_valid
        )
        .expect("write to String");
    }
    Ok(out)
}

/// Gap magnitudes `UB − LB` for each schedule and `n`.
pub fn gap_table_csv(measures: Measures, schedules: &[EpsilonSchedule], ns: &[u64]) -> Result<String> {
    let mut out = String::from(GAP_HEADER);
    out.push('\n');
    for schedule in schedules {
        for &n in ns {
            let r = match bounds_for_measures(measures, schedule, n) {
                Ok(r) => r,
                Err(Error::NotAdmissible { .. }) => continue,
                Err(e) => return Err(e),
            };
            let g = gap(&r);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                schedule,
                n,
                sci(r.epsilon_n),
                sci(r.delta_n),
                log10_field(r.log_ub),
                log10_field(r.log_lb),
                log10_field(g),
                format_sci(g.log10())
            )
            .expect("write to String");
        }
    }
    Ok(out)
}

/// One row per `(schedule, δ)`; a missing CSS is written as `not_found`.
pub fn css_csv(rows: &[(EpsilonSchedule, f64, Result<CssResult>)]) -> String {
    let mut out = String::from(CSS_HEADER);
    out.push('\n');
    for (schedule, delta, result) in rows {
        match result {
            Ok(r) => writeln!(
                out,
                "{},{},{},{}",
                schedule,
                sci(*delta),
                r.css,
                sci(r.criterion_at_css)
            ),
            Err(_) => writeln!(out, "{},{},not_found,", schedule, sci(*delta)),
        }
        .expect("write to String");
    }
    out
}

#[derive(Debug, Serialize)]
pub struct ExactJson {
    pub n: u64,
    pub epsilon: f64,
    pub beta_log10: f64,
    pub achieved_type1: f64,
    pub threshold_llr: Option<f64>,
}

impl ExactJson {
    pub fn new(n: u64, epsilon: f64, r: &NpResult) -> Self {
        ExactJson {
            n,
            epsilon,
            beta_log10: r.beta.log10(),
            achieved_type1: r.achieved_type1,
            threshold_llr: r.threshold_llr.is_finite().then_some(r.threshold_llr),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct McJson {
    pub estimate: f64,
    pub stderr: f64,
    pub threshold: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    pub resolved: bool,
}

impl McJson {
    pub fn new(r: &BetaEstimate, config: &McConfig) -> Self {
        McJson {
            estimate: r.estimate.estimate,
            stderr: r.estimate.stderr,
            threshold: r.threshold.is_finite().then_some(r.threshold),
            samples: config.num_samples,
            seed: config.seed,
            resolved: r.resolved,
        }
    }
}

/// Serializes with a trailing newline. Non-finite floats appear as `null`.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}
