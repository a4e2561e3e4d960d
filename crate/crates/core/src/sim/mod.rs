//! Synthetic streams and Monte Carlo estimates of the test's error rates.

pub mod allocator;
pub mod dist;
pub mod harness;
pub mod settings;

pub use allocator::{largest_ci_allocator, run_tournament, PairEngine, Tournament, TournamentOutcome};
pub use dist::Distribution;
pub use harness::{
    monte_carlo_table, replication_rng, run_replication, Frequencies, McReport, Replication, SimConfig,
    StopStats,
};
pub use settings::{builtin, builtin_settings, Relation, SettingSpec, BUILTIN_NAMES};
