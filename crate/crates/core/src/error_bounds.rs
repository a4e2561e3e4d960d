//! Closed-form bounds on the error probabilities of the overlap test.
//!
//! Type I is deciding `H1±` when the means are equal, type II is accepting
//! `H0` when they differ by more than `Δ`, and type III is deciding the
//! wrong direction. Bounds are stated per side (or per direction) and
//! capped at 1.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, param, Result};
use crate::evalue::{slope_sums, SupportBounds};
use crate::intervals::lh_bound;
use crate::overlap::{Mode, TestConfig};
use crate::weights::ScheduleKind;

fn check_weights(weights: &[f64], bounds: SupportBounds) -> Result<()> {
    if weights.is_empty() {
        return param("at least one weight is needed");
    }
    let width = bounds.width();
    for &w in weights {
        let scaled = w * width;
        if !(scaled > 0.0 && scaled < 1.0) {
            return param(format!("weight {w} violates 0 < w(b-a) < 1"));
        }
    }
    Ok(())
}

/// `C_{t0}`: the largest ratio `Σ w/(1-w(b-a)) / Σ w/(1+w(b-a))` over the
/// two streams' deterministic weights.
pub fn c_t0(
    weights_x: &[f64],
    weights_y: &[f64],
    bounds_p: SupportBounds,
    bounds_q: SupportBounds,
) -> Result<f64> {
    check_weights(weights_x, bounds_p)?;
    check_weights(weights_y, bounds_q)?;
    let ratio = |weights: &[f64], bounds: SupportBounds| {
        let (lower, upper) = slope_sums(weights, bounds.width());
        upper / lower
    };
    Ok(ratio(weights_x, bounds_p).max(ratio(weights_y, bounds_q)))
}

/// Per-side type I bound `α(αC/4)^{1/(1+C)} + ¼α²(4/(αC))^{C/(1+C)}`.
///
/// Equals `α^{3/2}` at `C = 1` and tends to `α` as `C` grows.
pub fn type1_bound(alpha: f64, c_t0: f64) -> f64 {
    let c = c_t0;
    let first = alpha * (alpha * c / 4.0).powf(1.0 / (1.0 + c));
    let second = 0.25 * alpha * alpha * (4.0 / (alpha * c)).powf(c / (1.0 + c));
    (first + second).min(1.0)
}

/// Anytime type II bound `2α`.
pub fn type2_anytime_bound(alpha: f64) -> f64 {
    (2.0 * alpha).min(1.0)
}

/// Fixed-time type II bound for a gap `Δ` between the means. `None` means
/// no guarantee: `Δ ≤ L_H(P) + L_H(Q)` or an `L_H` is not computable.
pub fn type2_fixed_bound(
    delta: f64,
    n: usize,
    m: usize,
    alpha: f64,
    c: f64,
    bounds_p: SupportBounds,
    bounds_q: SupportBounds,
) -> Result<Option<f64>> {
    let lh_p = lh_bound(n, alpha, c, bounds_p)?;
    let lh_q = lh_bound(m, alpha, c, bounds_q)?;
    let (Some(l_p), Some(l_q)) = (lh_p.bound, lh_q.bound) else {
        return Ok(None);
    };
    let margin = delta - l_p - l_q;
    if !(margin >= 0.0) {
        return Ok(None);
    }
    let s_p = n as f64 * lh_p.w / (1.0 + lh_p.w * bounds_p.width());
    let s_q = m as f64 * lh_q.w / (1.0 + lh_q.w * bounds_q.width());
    Ok(Some(
        (alpha * ((-margin * s_p).exp() + (-margin * s_q).exp())).min(1.0),
    ))
}

/// Per-direction type III bound
/// `α² + α(exp(-Δ Σ w_Y/(1+w_Y(b-a))) + exp(-Δ Σ w_X/(1+w_X(b-a))))`
/// over the first `t0` weights of each stream.
pub fn type3_bound(
    delta: f64,
    weights_x: &[f64],
    weights_y: &[f64],
    alpha: f64,
    bounds_p: SupportBounds,
    bounds_q: SupportBounds,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_weights(weights_x, bounds_p)?;
    check_weights(weights_y, bounds_q)?;
    if !(delta >= 0.0) {
        return param(format!("delta must be non-negative, got {delta}"));
    }
    let (s_x, _) = slope_sums(weights_x, bounds_p.width());
    let (s_y, _) = slope_sums(weights_y, bounds_q.width());
    Ok((alpha * alpha + alpha * ((-delta * s_y).exp() + (-delta * s_x).exp())).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBoundResult {
    pub eta: f64,
    pub eta_prime: f64,
    /// Smallest admissible gap `ℓ`; negative values mean `ℓ = 0` works.
    pub ell_requirement: f64,
    /// `α^{η'+1} + ¼ α^{2-η}`
    pub probability_bound: f64,
}

/// Bound on the probability that two intervals on equal-mean streams are
/// separated by more than `ℓ`, given each stream's slope sums
/// `(Σ w/(1+w(b-a)), Σ w/(1-w(b-a)))`.
pub fn gap_probability_bound(
    eta: f64,
    eta_prime: f64,
    alpha: f64,
    sums_x: (f64, f64),
    sums_y: (f64, f64),
) -> Result<GapBoundResult> {
    check_alpha(alpha)?;
    if !(eta > 0.0 && eta_prime > 0.0) {
        return param("eta and eta' must be positive");
    }
    let half_log = 0.5 * (1.0 / alpha).ln();
    let term = |(lower, upper): (f64, f64)| eta_prime / lower - eta / upper;
    Ok(GapBoundResult {
        eta,
        eta_prime,
        ell_requirement: half_log * term(sums_x).max(term(sums_y)),
        probability_bound: alpha.powf(eta_prime + 1.0) + 0.25 * alpha.powf(2.0 - eta),
    })
}

/// The `(η, η')` that minimise the gap bound at `ℓ = 0`:
/// `α^{η'} = (αC/4)^{1/(1+C)}` and `η = C η'`.
pub fn optimal_eta(alpha: f64, c_t0: f64) -> (f64, f64) {
    let eta_prime = (alpha * c_t0 / 4.0).ln() / ((1.0 + c_t0) * alpha.ln());
    (c_t0 * eta_prime, eta_prime)
}

/// Kullback-Leibler divergence between Bernoulli(p) and Bernoulli(q).
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// Burn-in heuristic `⌈log(1/α) / kl(½, ½ + Δ)⌉`.
pub fn t0_heuristic(alpha: f64, delta: f64) -> Result<usize> {
    check_alpha(alpha)?;
    if !(delta > 0.0 && delta < 0.5) {
        return param(format!("the t0 heuristic needs 0 < delta < 1/2, got {delta}"));
    }
    Ok(((1.0 / alpha).ln() / bernoulli_kl(0.5, 0.5 + delta)).ceil() as usize)
}

/// Theoretical guarantees attached to a test configuration. `None` marks a
/// bound that does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBounds {
    pub c_t0: Option<f64>,
    pub type1_per_side: Option<f64>,
    pub type1_two_sided: Option<f64>,
    pub type2: Option<f64>,
    pub type3_per_direction: Option<f64>,
    pub l_h_p: Option<f64>,
    pub l_h_q: Option<f64>,
}

/// Bounds for `config`. In fixed mode the whole sample plays the role of
/// the burn-in. Plug-in (Bernstein) weights are data-dependent, so none of
/// the bounds apply to them.
pub fn error_bounds(config: &TestConfig) -> Result<ErrorBounds> {
    error_bounds_with(config, None)
}

/// As [`error_bounds`], with `C_{t0}` replaced by `c_override` in the
/// type I bound.
pub fn error_bounds_with(config: &TestConfig, c_override: Option<f64>) -> Result<ErrorBounds> {
    config.validate()?;
    if let Some(c) = c_override {
        if !(c >= 1.0 && c.is_finite()) {
            return param(format!("C_t0 must be at least 1, got {c}"));
        }
    }
    let alpha = config.alpha;
    let (schedule_x, schedule_y) = config.schedules()?;
    let (horizon_x, horizon_y) = match config.mode {
        Mode::Fixed { n, m } => (n, m),
        Mode::Anytime => (config.t0, config.t0),
    };
    let weights = schedule_x
        .deterministic_weights(horizon_x)
        .zip(schedule_y.deterministic_weights(horizon_y));
    let (l_h_p, l_h_q) = match config.mode {
        Mode::Fixed { n, m } => (
            lh_bound(n, alpha, config.c, config.bounds_p)?.bound,
            lh_bound(m, alpha, config.c, config.bounds_q)?.bound,
        ),
        Mode::Anytime => (None, None),
    };
    let Some((wx, wy)) = weights else {
        return Ok(ErrorBounds {
            c_t0: None,
            type1_per_side: None,
            type1_two_sided: None,
            type2: None,
            type3_per_direction: None,
            l_h_p,
            l_h_q,
        });
    };
    let c = c_t0(&wx, &wy, config.bounds_p, config.bounds_q)?;
    let type1 = type1_bound(alpha, c_override.unwrap_or(c));
    let type2 = match config.mode {
        Mode::Anytime => Some(type2_anytime_bound(alpha)),
        Mode::Fixed { n, m } => match config.fixed_schedule {
            ScheduleKind::FixedHoeffding => type2_fixed_bound(
                config.delta,
                n,
                m,
                alpha,
                config.c,
                config.bounds_p,
                config.bounds_q,
            )?,
            _ => None,
        },
    };
    Ok(ErrorBounds {
        c_t0: Some(c),
        type1_per_side: Some(type1),
        type1_two_sided: Some((2.0 * type1).min(1.0)),
        type2,
        type3_per_direction: Some(type3_bound(
            config.delta,
            &wx,
            &wy,
            alpha,
            config.bounds_p,
            config.bounds_q,
        )?),
        l_h_p,
        l_h_q,
    })
}
