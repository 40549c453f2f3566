//! Vanishing Type I error budgets `ε_n`.
//!
//! Textual syntax (CLI and JSON): `const:0.1`, `recip`, `pow:0.1`,
//! `logrecip`, `exp:0.2`, `list:0.5,0.3,0.2`. Logarithms are natural, so
//! `logrecip` (`1/ln n`) is admissible from `n = 3`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonSchedule {
    /// `ε_n = ε`.
    Constant(f64),
    /// `ε_n = 1/n`.
    Reciprocal,
    /// `ε_n = n^{-a}`.
    Power(f64),
    /// `ε_n = 1/ln n`.
    LogReciprocal,
    /// `ε_n = e^{-rn}`.
    Exponential(f64),
    /// `ε_n = list[n - 1]`.
    Explicit(Vec<f64>),
}

impl EpsilonSchedule {
    /// Builds a schedule after checking the family's parameter constraints.
    pub fn validated(self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        match &self {
            EpsilonSchedule::Constant(e) if !(*e > 0.0 && *e < 1.0) => bad(format!("const:{e} needs 0 < ε < 1")),
            EpsilonSchedule::Power(a) if !(*a > 0.0 && a.is_finite()) => bad(format!("pow:{a} needs a > 0")),
            EpsilonSchedule::Exponential(r) if !(*r > 0.0 && r.is_finite()) => bad(format!("exp:{r} needs r > 0")),
            EpsilonSchedule::Explicit(v) if v.is_empty() => bad("list: needs at least one value".into()),
            EpsilonSchedule::Explicit(v) if v.iter().any(|e| !(*e > 0.0 && *e < 1.0)) => {
                bad("list: values must lie in (0, 1)".into())
            }
            _ => Ok(self),
        }
    }

    /// Smallest `n` at which [`epsilon_at`] succeeds.
    pub fn first_admissible(&self) -> u64 {
        match self {
            EpsilonSchedule::Reciprocal | EpsilonSchedule::Power(_) => 2,
            EpsilonSchedule::LogReciprocal => 3,
            _ => 1,
        }
    }

    /// Family name used in CSV output.
    pub fn name(&self) -> String {
        self.to_string()
    }
}

/// Evaluates `ε_n`, failing with `NotAdmissible` outside `(0, 1)`.
pub fn epsilon_at(schedule: &EpsilonSchedule, n: u64) -> Result<f64> {
    let not_admissible = || Error::NotAdmissible {
        schedule: schedule.to_string(),
        n,
    };
    if n == 0 {
        return Err(not_admissible());
    }
    let x = n as f64;
    let eps = match schedule {
        EpsilonSchedule::Constant(e) => *e,
        EpsilonSchedule::Reciprocal => 1.0 / x,
        EpsilonSchedule::Power(a) => (-a * x.ln()).exp(),
        EpsilonSchedule::LogReciprocal => 1.0 / x.ln(),
        EpsilonSchedule::Exponential(r) => (-r * x).exp(),
        EpsilonSchedule::Explicit(list) => *list.get((n - 1) as usize).ok_or_else(not_admissible)?,
    };
    if eps > 0.0 && eps < 1.0 {
        Ok(eps)
    } else {
        Err(not_admissible())
    }
}

/// Whether `1/ε_n` is `o(e^{rn})` for every `r > 0`.
pub fn is_subexponential(schedule: &EpsilonSchedule) -> Result<bool> {
    match schedule {
        EpsilonSchedule::Constant(_)
        | EpsilonSchedule::Reciprocal
        | EpsilonSchedule::Power(_)
        | EpsilonSchedule::LogReciprocal => Ok(true),
        EpsilonSchedule::Exponential(_) => Ok(false),
        EpsilonSchedule::Explicit(_) => Err(Error::Undecidable(schedule.to_string())),
    }
}

impl fmt::Display for EpsilonSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSchedule::Constant(e) => write!(f, "const:{e}"),
            EpsilonSchedule::Reciprocal => f.write_str("recip"),
            EpsilonSchedule::Power(a) => write!(f, "pow:{a}"),
            EpsilonSchedule::LogReciprocal => f.write_str("logrecip"),
            EpsilonSchedule::Exponential(r) => write!(f, "exp:{r}"),
            EpsilonSchedule::Explicit(v) => {
                f.write_str("list:")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for EpsilonSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, arg) = match s.split_once(':') {
            Some((f, a)) => (f, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::InvalidSchedule(format!("{s}: missing parameter")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidSchedule(format!("{s}: {e}")))
        };
        let schedule = match (family, arg) {
            ("const", a) => EpsilonSchedule::Constant(number(a)?),
            ("recip", None) => EpsilonSchedule::Reciprocal,
            ("pow", a) => EpsilonSchedule::Power(number(a)?),
            ("logrecip", None) => EpsilonSchedule::LogReciprocal,
            ("exp", a) => EpsilonSchedule::Exponential(number(a)?),
            ("list", Some(a)) => EpsilonSchedule::Explicit(
                a.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::InvalidSchedule(format!("{s}: {e}")))
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(Error::InvalidSchedule(s.to_string())),
        };
        schedule.validated()
    }
}

/// Parses a comma-free list of schedules separated by `;` or a list of
/// simple schedules separated by `,` (e.g. `recip,pow:0.1,logrecip`).
pub fn parse_schedule_list(s: &str) -> Result<Vec<EpsilonSchedule>> {
    if s.contains("list:") {
        return s.split(';').map(str::parse).collect();
    }
    s.split(',').filter(|x| !x.trim().is_empty()).map(str::parse).collect()
}
