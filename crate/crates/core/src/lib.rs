//! Finite-length bounds on the optimal Type II error of binary hypothesis
//! testing when the Type I error budget `ε_n` vanishes with the sample size.
//!
//! * [`distribution`]: validated distributions, `D`, `V`, `C_X`, tilting.
//! * [`schedule`]: the `ε_n` families.
//! * [`bounds`]: the `[LB, UB]` bracket and reference exponents.
//! * [`exact`]: exact Neyman-Pearson optimum by type-class enumeration.
//! * [`montecarlo`]: seeded simulation of `β_n` and of the concentration step.
//! * [`css`]: critical sample sizes.
//! * [`report`]: CSV/JSON renderers.
//! * [`cli`]: the `bht` command-line front end.
//!
//! All logarithms are natural and all divergences are in nats.

pub mod bounds;
pub mod cli;
pub mod css;
pub mod distribution;
pub mod error;
pub mod exact;
pub mod logvalue;
pub mod montecarlo;
pub mod normal;
pub mod report;
pub mod schedule;
pub mod settings;

pub use bounds::{bounds_at, bounds_at_abstract, gap, BoundsResult, Measures};
pub use css::{predicted_css, CssQuery, CssResult};
pub use distribution::{make_pair, DiscreteDistribution, HypothesisPair};
pub use error::{Error, Result};
pub use exact::{beta_bruteforce, beta_exact, NpResult};
pub use logvalue::LogValue;
pub use montecarlo::{estimate_beta, McConfig, McEstimate};
pub use schedule::{epsilon_at, EpsilonSchedule};
