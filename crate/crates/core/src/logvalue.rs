//! Nonnegative reals stored by their natural logarithm.
//!
//! Type II error probabilities in this crate routinely fall far below the
//! smallest positive `f64` (e.g. `e^{-10000}`), so they are carried as `ln x`
//! with `-inf` reserved for an exact zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

/// A nonnegative real `x` stored as `ln x`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    /// Wraps a natural logarithm. `NaN` is rejected by a debug assertion.
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "LogValue from NaN");
        LogValue(ln)
    }

    /// Converts a nonnegative linear value.
    pub fn from_linear(x: f64) -> Self {
        debug_assert!(x >= 0.0, "LogValue from negative {x}");
        LogValue(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log10(self) -> f64 {
        self.0 / std::f64::consts::LN_10
    }

    /// Linear value; underflows to 0 below the `f64` range.
    pub fn to_linear(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self - other`, defined only when `self >= other`.
    ///
    /// Returns `None` when the minuend is smaller than the subtrahend.
    pub fn checked_sub(self, other: LogValue) -> Option<LogValue> {
        if other.is_zero() {
            return Some(self);
        }
        match self.0.partial_cmp(&other.0)? {
            Ordering::Less => None,
            Ordering::Equal => Some(LogValue::ZERO),
            Ordering::Greater => Some(LogValue(self.0 + (-(other.0 - self.0).exp()).ln_1p())),
        }
    }

    /// Multiplies by a nonnegative integer-valued count given as `ln count`.
    pub fn scale_ln(self, ln_factor: f64) -> LogValue {
        if self.is_zero() {
            self
        } else {
            LogValue(self.0 + ln_factor)
        }
    }

    pub fn min(self, other: LogValue) -> LogValue {
        if self.0 <= other.0 {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: LogValue) -> LogValue {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }
}

impl Add for LogValue {
    type Output = LogValue;

    fn add(self, rhs: LogValue) -> LogValue {
        let (hi, lo) = if self.0 >= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        if lo == f64::NEG_INFINITY {
            return LogValue(hi);
        }
        LogValue(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            LogValue::ZERO
        } else {
            LogValue(self.0 + rhs.0)
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl std::iter::Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        // Two-pass log-sum-exp: collect, then shift by the maximum.
        let terms: Vec<f64> = iter.map(|v| v.0).collect();
        log_sum_exp(&terms)
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogValue(ln = {})", self.0)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_sci(self.log10()))
    }
}

/// `ln Σ e^{x_i}` without overflow or premature underflow.
pub fn log_sum_exp(terms: &[f64]) -> LogValue {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogValue::ZERO;
    }
    let s: f64 = terms.iter().map(|&x| (x - max).exp()).sum();
    LogValue(max + s.ln())
}

/// Formats `10^log10` with six significant digits, e.g. `9.54400e-317`.
///
/// The mantissa and exponent come from the base-10 logarithm directly, so
/// magnitudes below the `f64` range never flush to zero. `-inf` prints `0`.
pub fn format_sci(log10: f64) -> String {
    if log10 == f64::NEG_INFINITY {
        return "0".to_string();
    }
    if !log10.is_finite() {
        return format!("{log10}");
    }
    let mut exp = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exp);
    // Rounding to six digits can carry into the next decade.
    if (mantissa * 1e5).round() >= 1e6 {
        mantissa /= 10.0;
        exp += 1.0;
    }
    format!("{mantissa:.5}e{}", exp as i64)
}

/// Inverse of [`format_sci`]: returns `log10` of a scientific string.
pub fn parse_sci_log10(s: &str) -> Option<f64> {
    let s = s.trim();
    if s == "0" {
        return Some(f64::NEG_INFINITY);
    }
    let (m, e) = s.split_once(['e', 'E'])?;
    let mantissa: f64 = m.parse().ok()?;
    let exp: i64 = e.parse().ok()?;
    if mantissa <= 0.0 {
        return None;
    }
    Some(mantissa.log10() + exp as f64)
}
