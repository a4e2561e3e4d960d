use std::fmt;

/// Failures that map to a dedicated exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Unreadable or invalid input (exit 2).
    Input(String),
    /// The data ran out before a decision (exit 3).
    Inconclusive,
    /// Input arrived after the decision was final (exit 4).
    Protocol(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_PROTOCOL: i32 = 4;

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Inconclusive => EXIT_INCONCLUSIVE,
            Failure::Protocol(_) => EXIT_PROTOCOL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "{msg}"),
            Failure::Inconclusive => write!(f, "no decision could be reached with the available data"),
            Failure::Protocol(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Failure {}

pub fn input(msg: impl Into<String>) -> anyhow::Error {
    Failure::Input(msg.into()).into()
}
