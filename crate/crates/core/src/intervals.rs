//! Level-set confidence intervals `C_n(α) = { z ∈ [a, b] : E_n(z) ≤ 1/α }`.
//!
//! Because `E_n` is convex, the level set is an interval around the
//! minimiser `μ̂`. Each endpoint is the root of the monotone branch that
//! governs it: the `+` product on the left, the `-` product on the right.
//! Roots are bracketed to `1e-9 (b - a)` and returned on the outer side, so
//! the reported interval contains the exact level set.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, param, Result};
use crate::evalue::{EProcessState, SupportBounds};
use crate::roots::{find_root, Start};
use crate::weights::fixed_hoeffding_weight;

/// Endpoint tolerance, relative to the support width.
pub const ENDPOINT_TOLERANCE: f64 = 1e-9;
const MAX_EVALUATIONS: usize = 200;
const HINT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    pub n: usize,
    pub mu_hat: f64,
    /// The level set reached the lower support bound.
    pub clamped_lo: bool,
    /// The level set reached the upper support bound.
    pub clamped_hi: bool,
}

impl ConfidenceInterval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, z: f64) -> bool {
        self.lo <= z && z <= self.hi
    }

    /// Strictly above: every point of `self` exceeds every point of `other`.
    pub fn is_above(&self, other: &ConfidenceInterval) -> bool {
        self.lo > other.hi
    }

    pub fn is_below(&self, other: &ConfidenceInterval) -> bool {
        self.hi < other.lo
    }

    pub fn intersects(&self, other: &ConfidenceInterval) -> bool {
        !self.is_above(other) && !self.is_below(other)
    }
}

/// Solves for `C_n(α)` from scratch.
pub fn confidence_interval(state: &EProcessState, alpha: f64) -> Result<ConfidenceInterval> {
    confidence_interval_from(state, alpha, None)
}

/// Solves for `C_n(α)`, seeding the searches from a previous interval of
/// the same stream when one is given.
pub fn confidence_interval_from(
    state: &EProcessState,
    alpha: f64,
    previous: Option<&ConfidenceInterval>,
) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let bounds = state.bounds();
    let (a, b) = (bounds.lower(), bounds.upper());
    let width = bounds.width();
    let n = state.len();

    if n == 0 {
        return Ok(ConfidenceInterval {
            lo: a,
            hi: b,
            alpha,
            n,
            mu_hat: 0.5 * (a + b),
            clamped_lo: true,
            clamped_hi: true,
        });
    }

    let mu_hat = state.minimizer_from(previous.map(|p| p.mu_hat))?;
    // E_n(z) > 1/α  <=>  the dominant log-product exceeds log(2/α). The `+`
    // product decreases in z and the `-` product increases, so the level set
    // is [r₊, r₋] with each end the root of one monotone function.
    let level = (2.0 / alpha).ln();
    let tol = ENDPOINT_TOLERANCE * width;
    let grid = state.grid();
    let last = grid.map_or(0, |g| g.points().len() - 1);

    let excess_plus = |z: f64| state.log_plus(z) - level;
    let (lo, clamped_lo) = if excess_plus(a) <= 0.0 {
        (a, true)
    } else {
        let start = match (previous, grid) {
            (Some(p), _) if !p.clamped_lo => Start::Hint {
                at: p.lo,
                step: HINT_STEP * width,
            },
            (_, Some(g)) => {
                let (l, r) = g.bracket(0, last, |lp, _| lp > level);
                Start::Bracket(l, r)
            }
            _ => Start::Cold,
        };
        let s = find_root(excess_plus, a, b, start, tol, MAX_EVALUATIONS);
        (s.left, false)
    };

    let slack_minus = |z: f64| level - state.log_minus(z);
    let (hi, clamped_hi) = if slack_minus(b) > 0.0 {
        (b, true)
    } else {
        let start = match (previous, grid) {
            (Some(p), _) if !p.clamped_hi => Start::Hint {
                at: p.hi,
                step: HINT_STEP * width,
            },
            (_, Some(g)) => {
                let (l, r) = g.bracket(0, last, |_, lm| lm <= level);
                Start::Bracket(l, r)
            }
            _ => Start::Cold,
        };
        let s = find_root(slack_minus, a, b, start, tol, MAX_EVALUATIONS);
        (s.right, false)
    };

    Ok(ConfidenceInterval {
        lo,
        hi,
        alpha,
        n,
        mu_hat,
        clamped_lo,
        clamped_hi,
    })
}

/// Closed-form length bound for an interval built with a constant weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBound {
    pub w: f64,
    /// `w² / (1 - w(b-a))`
    pub v: f64,
    pub n: usize,
    pub sigma_sq: f64,
    pub alpha: f64,
    pub feasible: bool,
    /// `None` when the feasibility condition fails.
    pub bound: Option<f64>,
}

/// Upper bound on `L(C_n(α))` when every weight equals `w`:
///
/// ```text
/// 2 (n w - sqrt(n²w² - 2 n v (n v σ̂²/2 + log(2/α)))) / (n v)
/// ```
///
/// provided the discriminant is non-negative.
pub fn length_bound_constant_weights(
    w: f64,
    n: usize,
    sigma_sq: f64,
    alpha: f64,
    bounds: SupportBounds,
) -> Result<LengthBound> {
    check_alpha(alpha)?;
    let scaled = w * bounds.width();
    if !(scaled > 0.0 && scaled < 1.0) {
        return param(format!("constant weight must satisfy 0 < w(b-a) < 1, got {scaled}"));
    }
    if !(sigma_sq.is_finite() && sigma_sq >= 0.0) {
        return param(format!("variance must be non-negative, got {sigma_sq}"));
    }
    let v = w * w / (1.0 - scaled);
    let nf = n as f64;
    let nv = nf * v;
    let constant = nv * sigma_sq / 2.0 + (2.0 / alpha).ln();
    let nw = nf * w;
    let discriminant = nw * nw - 2.0 * nv * constant;
    let feasible = n > 0 && discriminant >= 0.0;
    // nw - sqrt(D) rewritten as (n²w² - D) / (nw + sqrt(D)) to avoid cancellation.
    let bound = feasible.then(|| 4.0 * constant / (nw + discriminant.sqrt()));
    Ok(LengthBound {
        w,
        v,
        n,
        sigma_sq,
        alpha,
        feasible,
        bound,
    })
}

/// Worst-case length bound `L_H` for the fixed-horizon Hoeffding weights:
/// the constant-weight bound with `σ̂²` replaced by its maximum `(b-a)²/4`.
pub fn lh_bound(n: usize, alpha: f64, c: f64, bounds: SupportBounds) -> Result<LengthBound> {
    let w = fixed_hoeffding_weight(n, alpha, c, bounds)?;
    let width = bounds.width();
    length_bound_constant_weights(w, n, 0.25 * width * width, alpha, bounds)
}
