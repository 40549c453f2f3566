use thiserror::Error;

/// Errors raised by the library. Every variant maps to one of the CLI exit
/// classes through [`Error::is_not_found`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability mass at index {index} is negative ({value})")]
    NegativeMass { index: usize, value: f64 },

    #[error("masses sum to {sum}, which deviates from 1 by more than {tolerance}")]
    SumOutOfTolerance { sum: f64, tolerance: f64 },

    #[error("alphabet has {size} symbols; at least 2 are required")]
    AlphabetTooSmall { size: usize },

    #[error("alphabet sizes differ: p has {p} symbols, q has {q}")]
    AlphabetSizeMismatch { p: usize, q: usize },

    #[error("supports differ at symbol {index}: p = {p}, q = {q}")]
    SupportMismatch { index: usize, p: f64, q: f64 },

    #[error("tilt parameter {0} is outside [0, 1]")]
    TiltOutOfRange(f64),

    #[error("rate {rate} is outside the admissible range [{min}, {max}]")]
    RateOutOfRange { rate: f64, min: f64, max: f64 },

    #[error("target divergence {target} is unreachable (largest reachable {reachable})")]
    TargetUnreachable { target: f64, reachable: f64 },

    #[error("schedule {schedule} is not admissible at n = {n}")]
    NotAdmissible { schedule: String, n: u64 },

    #[error("sub-exponential behaviour of schedule {0} cannot be decided")]
    Undecidable(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("argument {name} = {value} is outside its domain")]
    OutOfDomain { name: &'static str, value: f64 },

    #[error("{types} type classes exceed the enumeration cap of {cap}")]
    EnumerationTooLarge { types: u128, cap: u128 },

    #[error("exhaustive search over {sequences} sequences is too large (limit {limit})")]
    TooLarge { sequences: u128, limit: u128 },

    #[error("pair is degenerate (C_X = 0); the concentration check is vacuous")]
    DegeneratePair,

    #[error("no n <= {n_max} satisfies the criterion")]
    NotFound { n_max: u64 },

    #[error("oracle is infeasible: {0}")]
    OracleInfeasible(String),

    #[error("model file: {0}")]
    Model(String),
}

impl Error {
    /// True for search/feasibility failures (as opposed to invalid inputs).
    pub fn is_not_found(&self) -> bool {
        matches!(
            self,
            Error::NotFound { .. }
                | Error::OracleInfeasible(_)
                | Error::EnumerationTooLarge { .. }
                | Error::TooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
