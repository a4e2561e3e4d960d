use thiserror::Error;

use crate::overlap::DecisionKind;

/// Errors raised by the e-process, interval and test machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("observation {x} is outside the support [{a}, {b}]")]
    OutOfRange { x: f64, a: f64, b: f64 },

    #[error("evaluation point {z} is outside the support [{a}, {b}]")]
    Domain { z: f64, a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("engine already decided {0}; no further observations are accepted")]
    Frozen(DecisionKind),

    #[error("every engine has reached a decision")]
    AllDecided,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        param(format!("alpha must lie in (0, 1), got {alpha}"))
    }
}
