//! Betting-weight schedules.
//!
//! Every schedule emits a weight `w_t` for the `t`-th observation that
//! depends only on the observations strictly before it, and satisfies
//! `0 < w_t (b - a) < 1` so that every factor `1 ± w_t (x_t - z)` of the
//! e-process stays positive on the support.
//!
//! Three families are provided:
//!
//! * [`WeightSchedule::FixedHoeffding`]: a constant weight tuned for a known
//!   horizon `n`, using the worst-case variance `(b - a)² / 4`.
//! * [`WeightSchedule::FixedBernstein`]: a horizon-tuned plug-in weight that
//!   uses the running variance of the past observations.
//! * [`WeightSchedule::Anytime`]: deterministic weights during a burn-in of
//!   `t0` observations, then a plug-in weight with `n` replaced by
//!   `t log(1 + t)`, capped by the last burn-in level.

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, param, Result};
use crate::evalue::SupportBounds;

/// Weight schedule used by an [`EProcessState`](crate::EProcessState).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSchedule {
    FixedHoeffding {
        n: usize,
        alpha: f64,
        c: f64,
        bounds: SupportBounds,
    },
    /// Plug-in weights for a fixed horizon. The emitted weight is capped at
    /// the `FixedHoeffding` weight with the same `(n, alpha, c)`.
    FixedBernstein {
        n: usize,
        alpha: f64,
        c: f64,
        bounds: SupportBounds,
    },
    Anytime {
        alpha: f64,
        c: f64,
        t0: usize,
        bounds: SupportBounds,
    },
    /// The same weight `w` for every observation.
    Constant { w: f64, bounds: SupportBounds },
}

/// Which schedule family to build, without its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    FixedHoeffding,
    FixedBernstein,
    Anytime,
}

impl ScheduleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::FixedHoeffding => "fixed-hoeffding",
            ScheduleKind::FixedBernstein => "fixed-bernstein",
            ScheduleKind::Anytime => "anytime",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fixed-hoeffding" => Ok(ScheduleKind::FixedHoeffding),
            "fixed-bernstein" => Ok(ScheduleKind::FixedBernstein),
            "anytime" => Ok(ScheduleKind::Anytime),
            other => Err(format!(
                "unknown schedule `{other}` (expected fixed-hoeffding, fixed-bernstein or anytime)"
            )),
        }
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return param(format!("tuning constant c must be positive, got {c}"));
    }
    if c < 1.0 {
        log::warn!("tuning constant c = {c} is below 1; the weights stay valid but the type-I analysis assumes c >= 1");
    }
    Ok(())
}

fn check_horizon(n: usize) -> Result<()> {
    if n == 0 {
        return param("horizon n must be at least 1");
    }
    Ok(())
}

/// Constant fixed-horizon weight `1/(b-a) · 1/(1 + sqrt(n / (8 c² log(2/α))))`.
pub fn fixed_hoeffding_weight(n: usize, alpha: f64, c: f64, bounds: SupportBounds) -> Result<f64> {
    check_horizon(n)?;
    check_alpha(alpha)?;
    check_c(c)?;
    Ok(hoeffding_level(n as f64, alpha, c, bounds.width()))
}

/// Uncapped Bernstein-type weight `1 / ((b-a) + sqrt(n σ̂²_{t-1} / (2 log(2/α))))`.
///
/// With `sigma_sq_prev == 0` this returns exactly `1/(b-a)`, which is not a
/// valid betting weight; schedules cap it before use.
pub fn fixed_bernstein_weight(
    n: usize,
    alpha: f64,
    sigma_sq_prev: f64,
    bounds: SupportBounds,
) -> Result<f64> {
    check_horizon(n)?;
    check_alpha(alpha)?;
    if !(sigma_sq_prev.is_finite() && sigma_sq_prev >= 0.0) {
        return param(format!("variance must be non-negative, got {sigma_sq_prev}"));
    }
    Ok(bernstein_level(n as f64, alpha, sigma_sq_prev, bounds.width()))
}

/// Anytime weight for observation `t` (1-based).
///
/// Deterministic for `t <= t0`; afterwards the plug-in weight with horizon
/// `t log(1 + t)`, capped by the deterministic level evaluated at `t0`.
pub fn anytime_weight(
    t: usize,
    t0: usize,
    alpha: f64,
    c: f64,
    sigma_sq_prev: f64,
    bounds: SupportBounds,
) -> Result<f64> {
    if t == 0 || t0 == 0 {
        return param("t and t0 must both be at least 1");
    }
    check_alpha(alpha)?;
    check_c(c)?;
    if !(sigma_sq_prev.is_finite() && sigma_sq_prev >= 0.0) {
        return param(format!("variance must be non-negative, got {sigma_sq_prev}"));
    }
    Ok(anytime_level(t, t0, alpha, c, sigma_sq_prev, bounds.width()))
}

#[inline]
fn hoeffding_level(horizon: f64, alpha: f64, c: f64, width: f64) -> f64 {
    let log_term = (2.0 / alpha).ln();
    1.0 / (width * (1.0 + (horizon / (8.0 * c * c * log_term)).sqrt()))
}

#[inline]
fn bernstein_level(horizon: f64, alpha: f64, sigma_sq: f64, width: f64) -> f64 {
    let log_term = (2.0 / alpha).ln();
    1.0 / (width + (horizon * sigma_sq / (2.0 * log_term)).sqrt())
}

#[inline]
fn anytime_level(t: usize, t0: usize, alpha: f64, c: f64, sigma_sq: f64, width: f64) -> f64 {
    let tf = t as f64;
    let log_t = (tf + 1.0).ln();
    if t <= t0 {
        hoeffding_level(tf * log_t, alpha, c, width)
    } else {
        let cap = hoeffding_level(t0 as f64 * log_t, alpha, c, width);
        bernstein_level(tf * log_t, alpha, sigma_sq, width).min(cap)
    }
}

impl WeightSchedule {
    pub fn fixed_hoeffding(n: usize, alpha: f64, c: f64, bounds: SupportBounds) -> Result<Self> {
        fixed_hoeffding_weight(n, alpha, c, bounds)?;
        Ok(WeightSchedule::FixedHoeffding { n, alpha, c, bounds })
    }

    pub fn fixed_bernstein(n: usize, alpha: f64, c: f64, bounds: SupportBounds) -> Result<Self> {
        fixed_hoeffding_weight(n, alpha, c, bounds)?;
        Ok(WeightSchedule::FixedBernstein { n, alpha, c, bounds })
    }

    pub fn anytime(alpha: f64, c: f64, t0: usize, bounds: SupportBounds) -> Result<Self> {
        anytime_weight(1, t0, alpha, c, 0.0, bounds)?;
        Ok(WeightSchedule::Anytime { alpha, c, t0, bounds })
    }

    pub fn constant(w: f64, bounds: SupportBounds) -> Result<Self> {
        let scaled = w * bounds.width();
        if !(scaled.is_finite() && scaled > 0.0 && scaled < 1.0) {
            return param(format!(
                "constant weight must satisfy 0 < w(b-a) < 1, got w(b-a) = {scaled}"
            ));
        }
        Ok(WeightSchedule::Constant { w, bounds })
    }

    /// Builds a schedule of the given family; `n` is the horizon used by the
    /// fixed families and is ignored by the anytime one.
    pub fn from_kind(
        kind: ScheduleKind,
        n: usize,
        alpha: f64,
        c: f64,
        t0: usize,
        bounds: SupportBounds,
    ) -> Result<Self> {
        match kind {
            ScheduleKind::FixedHoeffding => Self::fixed_hoeffding(n, alpha, c, bounds),
            ScheduleKind::FixedBernstein => Self::fixed_bernstein(n, alpha, c, bounds),
            ScheduleKind::Anytime => Self::anytime(alpha, c, t0, bounds),
        }
    }

    pub fn bounds(&self) -> SupportBounds {
        match *self {
            WeightSchedule::FixedHoeffding { bounds, .. }
            | WeightSchedule::FixedBernstein { bounds, .. }
            | WeightSchedule::Anytime { bounds, .. }
            | WeightSchedule::Constant { bounds, .. } => bounds,
        }
    }

    pub fn kind(&self) -> Option<ScheduleKind> {
        match self {
            WeightSchedule::FixedHoeffding { .. } => Some(ScheduleKind::FixedHoeffding),
            WeightSchedule::FixedBernstein { .. } => Some(ScheduleKind::FixedBernstein),
            WeightSchedule::Anytime { .. } => Some(ScheduleKind::Anytime),
            WeightSchedule::Constant { .. } => None,
        }
    }

    /// Weight for observation `t` (1-based) given the empirical variance of
    /// the first `t - 1` observations.
    pub fn weight(&self, t: usize, sigma_sq_prev: f64) -> f64 {
        debug_assert!(t >= 1);
        match *self {
            WeightSchedule::FixedHoeffding { n, alpha, c, bounds } => {
                hoeffding_level(n as f64, alpha, c, bounds.width())
            }
            WeightSchedule::FixedBernstein { n, alpha, c, bounds } => {
                let width = bounds.width();
                bernstein_level(n as f64, alpha, sigma_sq_prev, width)
                    .min(hoeffding_level(n as f64, alpha, c, width))
            }
            WeightSchedule::Anytime { alpha, c, t0, bounds } => {
                anytime_level(t, t0, alpha, c, sigma_sq_prev, bounds.width())
            }
            WeightSchedule::Constant { w, .. } => w,
        }
    }

    /// Number of leading weights that do not depend on the data, or `None`
    /// when every weight is deterministic.
    pub fn deterministic_prefix(&self) -> Option<usize> {
        match *self {
            WeightSchedule::FixedHoeffding { .. } | WeightSchedule::Constant { .. } => None,
            WeightSchedule::FixedBernstein { .. } => Some(0),
            WeightSchedule::Anytime { t0, .. } => Some(t0),
        }
    }

    /// The first `count` weights, if they are data-independent.
    pub fn deterministic_weights(&self, count: usize) -> Option<Vec<f64>> {
        match self.deterministic_prefix() {
            Some(prefix) if prefix < count => None,
            _ => Some((1..=count).map(|t| self.weight(t, 0.0)).collect()),
        }
    }
}

/// One-pass mean and variance (Welford).
///
/// `variance()` is the biased empirical variance `ssq / t`; before any
/// observation it returns the prior `sigma0_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunningVariance {
    count: usize,
    mean: f64,
    ssq: f64,
    sigma0_sq: f64,
}

impl RunningVariance {
    pub fn new(sigma0_sq: f64) -> Self {
        RunningVariance {
            count: 0,
            mean: 0.0,
            ssq: 0.0,
            sigma0_sq,
        }
    }

    /// Prior set to the largest variance a variable on `bounds` can have.
    pub fn for_bounds(bounds: SupportBounds) -> Self {
        let half = bounds.width() / 2.0;
        Self::new(half * half)
    }

    pub fn update(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.ssq += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn ssq(&self) -> f64 {
        self.ssq
    }

    pub fn variance(&self) -> f64 {
        if self.count == 0 {
            self.sigma0_sq
        } else {
            self.ssq / self.count as f64
        }
    }
}
