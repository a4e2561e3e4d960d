use rand::Rng;
use rand_distr::{Distribution as _, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Laws used to generate synthetic streams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum Distribution {
    Bernoulli { p: f64 },
    Uniform { lo: f64, hi: f64 },
    Beta { a: f64, b: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Bernoulli { p } if (0.0..=1.0).contains(&p) => Ok(()),
            Distribution::Bernoulli { p } => param(format!("Bernoulli p must lie in [0, 1], got {p}")),
            Distribution::Uniform { lo, hi } if lo.is_finite() && hi.is_finite() && lo < hi => Ok(()),
            Distribution::Uniform { lo, hi } => param(format!("Uniform needs lo < hi, got [{lo}, {hi}]")),
            Distribution::Beta { a, b } if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() => Ok(()),
            Distribution::Beta { a, b } => param(format!("Beta shapes must be positive, got ({a}, {b})")),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => p,
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            Distribution::Beta { a, b } => a / (a + b),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => p * (1.0 - p),
            Distribution::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Distribution::Beta { a, b } => a * b / ((a + b) * (a + b) * (a + b + 1.0)),
        }
    }

    /// Smallest interval holding every draw.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Distribution::Bernoulli { .. } | Distribution::Beta { .. } => (0.0, 1.0),
            Distribution::Uniform { lo, hi } => (lo, hi),
        }
    }

    /// One draw. Parameters are assumed valid; see [`Distribution::validate`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            Distribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Distribution::Beta { a, b } => {
                // Ratio of two Gamma draws.
                let x = Gamma::new(a, 1.0).expect("validated shape").sample(rng);
                let y = Gamma::new(b, 1.0).expect("validated shape").sample(rng);
                x / (x + y)
            }
        }
    }
}
