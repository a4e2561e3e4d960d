//! Command-line front end for the interval overlap tests.
//!
//! Every subcommand writes to a caller-supplied sink and returns the exit
//! status: 0 success, 2 input error, 3 inconclusive, 4 protocol violation.

pub mod chart;
pub mod commands;
pub mod data;
pub mod failure;
pub mod report;

pub use commands::{run, Cli};
pub use failure::Failure;
