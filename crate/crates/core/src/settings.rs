//! Numerical tolerances shared across the crate.

/// One record holding every tolerance the library uses. [`Settings::default`]
/// carries the documented values; callers that need different ones build
/// their own record and pass it to the `*_with` variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Allowed deviation of a mass vector's sum from 1 before renormalization.
    pub sum_tolerance: f64,
    /// Target accuracy for bisection solvers (tilt rate, synthetic pairs).
    pub bisection_tolerance: f64,
    /// Level-merging tolerance per observation for LLR totals.
    pub level_merge_tolerance: f64,
    /// Largest number of type classes the exact enumerator will visit.
    pub enumeration_cap: u128,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            sum_tolerance: 1e-9,
            bisection_tolerance: 1e-12,
            level_merge_tolerance: 1e-12,
            enumeration_cap: 5_000_000,
        }
    }
}
