//! Anytime-valid comparison of bounded means.
//!
//! Each stream of observations in a known range `[a, b]` drives a betting
//! e-process
//!
//! ```text
//! E_n(z) = ½ max( Π (1 + w_t (x_t - z)), Π (1 - w_t (x_t - z)) )
//! ```
//!
//! whose sublevel set `{ z : E_n(z) ≤ 1/α }` is a confidence interval for
//! the mean. Two such intervals are compared to decide whether one mean is
//! lower, higher, or within an effect size `Δ` of the other, either once at
//! a planned sample size or sequentially with optional stopping.
//!
//! ```
//! use ci_overlap::{confidence_interval, EProcessState, SupportBounds, WeightSchedule};
//!
//! let schedule = WeightSchedule::fixed_hoeffding(8, 0.1, 1.0, SupportBounds::unit())?;
//! let mut state = EProcessState::new(schedule);
//! for x in [0.2, 0.9, 0.4, 0.7, 0.5, 0.6, 0.3, 0.8] {
//!     state.observe(x)?;
//! }
//! let ci = confidence_interval(&state, 0.1)?;
//! assert!(ci.lo < 0.55 && 0.55 < ci.hi);
//! # Ok::<(), ci_overlap::Error>(())
//! ```

mod error;
pub mod error_bounds;
pub mod evalue;
pub mod intervals;
pub mod overlap;
mod roots;
pub mod sim;
pub mod weights;

pub use error::{Error, Result};
pub use error_bounds::{error_bounds, ErrorBounds};
pub use evalue::{EProcessState, LogEValue, SupportBounds};
pub use intervals::{confidence_interval, confidence_interval_from, ConfidenceInterval};
pub use overlap::{fixed_time_decision, Arm, Decision, DecisionKind, Mode, OverlapEngine, TestConfig};
pub use weights::{RunningVariance, ScheduleKind, WeightSchedule};
