//! Three-way comparison of two means through the overlap of their
//! confidence intervals.
//!
//! With `X ~ P` and `Y ~ Q`, the test decides between
//!
//! * `H1-`: `E[X] < E[Y]`, when `C_n(α; X)` lies strictly below `C_m(α; Y)`,
//! * `H1+`: `E[X] > E[Y]`, when it lies strictly above,
//! * `H0`: the means are within the effect size `Δ` of each other.
//!
//! The fixed-time test looks once at samples of planned sizes. The anytime
//! [`OverlapEngine`] ingests observations one at a time and stops as soon as
//! the intervals separate, or intersect with a union no longer than `Δ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, param, Error, Result};
use crate::evalue::{EProcessState, SupportBounds};
use crate::intervals::{confidence_interval, confidence_interval_from, ConfidenceInterval};
use crate::weights::{ScheduleKind, WeightSchedule};

/// One of the two compared streams: `P` produces `X`, `Q` produces `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Arm {
    P,
    Q,
}

impl Arm {
    pub fn other(self) -> Arm {
        match self {
            Arm::P => Arm::Q,
            Arm::Q => Arm::P,
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arm::P => "P",
            Arm::Q => "Q",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    /// One look after `n` draws from `P` and `m` from `Q`.
    Fixed { n: usize, m: usize },
    /// Sequential monitoring with a burn-in of `t0` draws per arm.
    Anytime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub alpha: f64,
    /// Effect size `Δ`: means closer than this count as equal.
    pub delta: f64,
    /// Burn-in per arm (anytime mode).
    pub t0: usize,
    pub c: f64,
    pub bounds_p: SupportBounds,
    pub bounds_q: SupportBounds,
    pub mode: Mode,
    /// Weight family for fixed mode.
    pub fixed_schedule: ScheduleKind,
    /// Evaluate the anytime decision every `stride` observations.
    pub stride: usize,
}

impl TestConfig {
    pub fn anytime(
        alpha: f64,
        delta: f64,
        t0: usize,
        c: f64,
        bounds_p: SupportBounds,
        bounds_q: SupportBounds,
    ) -> Result<Self> {
        let config = TestConfig {
            alpha,
            delta,
            t0,
            c,
            bounds_p,
            bounds_q,
            mode: Mode::Anytime,
            fixed_schedule: ScheduleKind::FixedHoeffding,
            stride: 1,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn fixed(
        alpha: f64,
        delta: f64,
        n: usize,
        m: usize,
        c: f64,
        bounds_p: SupportBounds,
        bounds_q: SupportBounds,
    ) -> Result<Self> {
        let config = TestConfig {
            alpha,
            delta,
            t0: 1,
            c,
            bounds_p,
            bounds_q,
            mode: Mode::Fixed { n, m },
            fixed_schedule: ScheduleKind::FixedHoeffding,
            stride: 1,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        self.stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fixed_schedule(mut self, kind: ScheduleKind) -> Result<Self> {
        self.fixed_schedule = kind;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return param(format!("effect size delta must be positive, got {}", self.delta));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return param(format!("tuning constant c must be positive, got {}", self.c));
        }
        if self.stride == 0 {
            return param("stride must be at least 1");
        }
        match self.mode {
            Mode::Anytime if self.t0 == 0 => param("burn-in t0 must be at least 1"),
            Mode::Fixed { n, m } if n == 0 || m == 0 => param("fixed mode needs n, m >= 1"),
            Mode::Fixed { .. } if self.fixed_schedule == ScheduleKind::Anytime => {
                param("fixed mode takes a fixed-horizon schedule")
            }
            _ => Ok(()),
        }
    }

    /// Weight schedules for `P` and `Q`. In fixed mode each stream is tuned
    /// to its own horizon.
    pub fn schedules(&self) -> Result<(WeightSchedule, WeightSchedule)> {
        let (kind, n, m) = match self.mode {
            Mode::Fixed { n, m } => (self.fixed_schedule, n, m),
            Mode::Anytime => (ScheduleKind::Anytime, 0, 0),
        };
        Ok((
            WeightSchedule::from_kind(kind, n, self.alpha, self.c, self.t0, self.bounds_p)?,
            WeightSchedule::from_kind(kind, m, self.alpha, self.c, self.t0, self.bounds_q)?,
        ))
    }

    pub fn bounds(&self, arm: Arm) -> SupportBounds {
        match arm {
            Arm::P => self.bounds_p,
            Arm::Q => self.bounds_q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionKind {
    /// `E[X] < E[Y]`.
    #[serde(rename = "H1-")]
    H1Minus,
    #[serde(rename = "H0")]
    H0,
    /// `E[X] > E[Y]`.
    #[serde(rename = "H1+")]
    H1Plus,
    #[serde(rename = "continue")]
    Continue,
}

impl DecisionKind {
    pub fn is_terminal(self) -> bool {
        self != DecisionKind::Continue
    }

    /// Where the mean of `X` sits relative to that of `Y`.
    pub fn relation(self) -> &'static str {
        match self {
            DecisionKind::H1Minus => "lower",
            DecisionKind::H0 => "equal",
            DecisionKind::H1Plus => "larger",
            DecisionKind::Continue => "undecided",
        }
    }
}

impl fmt::Display for DecisionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionKind::H1Minus => "H1-",
            DecisionKind::H0 => "H0",
            DecisionKind::H1Plus => "H1+",
            DecisionKind::Continue => "continue",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub kind: DecisionKind,
    /// Observations of `X` included in the decision.
    pub n: usize,
    /// Observations of `Y` included in the decision.
    pub m: usize,
    /// Intervals used by the decision; absent during the burn-in.
    pub ci_x: Option<ConfidenceInterval>,
    pub ci_y: Option<ConfidenceInterval>,
}

/// Length of the smallest interval covering both.
pub fn union_length(ci_x: &ConfidenceInterval, ci_y: &ConfidenceInterval) -> f64 {
    ci_x.hi.max(ci_y.hi) - ci_x.lo.min(ci_y.lo)
}

/// Applies the decision rules in order; `delta = None` is the fixed-time
/// rule where intersecting intervals always mean `H0`.
fn classify(ci_x: &ConfidenceInterval, ci_y: &ConfidenceInterval, delta: Option<f64>) -> DecisionKind {
    if ci_x.is_above(ci_y) {
        DecisionKind::H1Plus
    } else if ci_x.is_below(ci_y) {
        DecisionKind::H1Minus
    } else {
        match delta {
            Some(delta) if union_length(ci_x, ci_y) > delta => DecisionKind::Continue,
            _ => DecisionKind::H0,
        }
    }
}

/// The fixed-time test on complete samples. `config.mode` must be
/// `Fixed { n, m }` with `n = xs.len()` and `m = ys.len()`.
pub fn fixed_time_decision(xs: &[f64], ys: &[f64], config: &TestConfig) -> Result<Decision> {
    if xs.is_empty() || ys.is_empty() {
        return param("the fixed-time test needs at least one observation per sample");
    }
    config.validate()?;
    match config.mode {
        Mode::Fixed { n, m } if n == xs.len() && m == ys.len() => {}
        Mode::Fixed { n, m } => {
            return param(format!(
                "fixed mode planned n = {n}, m = {m} but got {} and {} observations",
                xs.len(),
                ys.len()
            ))
        }
        Mode::Anytime => return param("fixed_time_decision needs a fixed-mode configuration"),
    }
    let (schedule_x, schedule_y) = config.schedules()?;
    let mut x = EProcessState::new(schedule_x);
    for &v in xs {
        x.observe(v)?;
    }
    let mut y = EProcessState::new(schedule_y);
    for &v in ys {
        y.observe(v)?;
    }
    let ci_x = confidence_interval(&x, config.alpha)?;
    let ci_y = confidence_interval(&y, config.alpha)?;
    Ok(Decision {
        kind: classify(&ci_x, &ci_y, None),
        n: xs.len(),
        m: ys.len(),
        ci_x: Some(ci_x),
        ci_y: Some(ci_y),
    })
}

/// Sequential overlap test.
///
/// Observations may arrive from either arm in any order chosen by the
/// caller. No decision is taken until both arms have `t0` observations;
/// after that the decision is re-evaluated every `stride` observations.
/// Once a terminal decision is reached the engine refuses further input.
#[derive(Debug, Clone)]
pub struct OverlapEngine {
    config: TestConfig,
    x: EProcessState,
    y: EProcessState,
    ci_x: Option<ConfidenceInterval>,
    ci_y: Option<ConfidenceInterval>,
    pending: usize,
    terminal: Option<Decision>,
}

impl OverlapEngine {
    pub fn new(config: TestConfig) -> Result<Self> {
        config.validate()?;
        if config.mode != Mode::Anytime {
            return param("the sequential engine needs an anytime configuration");
        }
        let (schedule_x, schedule_y) = config.schedules()?;
        Ok(OverlapEngine {
            config,
            x: EProcessState::new(schedule_x),
            y: EProcessState::new(schedule_y),
            ci_x: None,
            ci_y: None,
            pending: 0,
            terminal: None,
        })
    }

    pub fn config(&self) -> &TestConfig {
        &self.config
    }

    pub fn state(&self, arm: Arm) -> &EProcessState {
        match arm {
            Arm::P => &self.x,
            Arm::Q => &self.y,
        }
    }

    pub fn len(&self, arm: Arm) -> usize {
        self.state(arm).len()
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal.is_some()
    }

    pub fn terminal(&self) -> Option<&Decision> {
        self.terminal.as_ref()
    }

    fn frozen(&self) -> Result<()> {
        match &self.terminal {
            Some(d) => Err(Error::Frozen(d.kind)),
            None => Ok(()),
        }
    }

    /// Records `value` for `arm` without evaluating the decision.
    pub fn push(&mut self, arm: Arm, value: f64) -> Result<()> {
        self.frozen()?;
        match arm {
            Arm::P => self.x.observe(value)?,
            Arm::Q => self.y.observe(value)?,
        };
        self.pending += 1;
        Ok(())
    }

    /// Evaluates the decision rules on everything observed so far.
    pub fn evaluate(&mut self) -> Result<Decision> {
        self.frozen()?;
        self.pending = 0;
        let (n, m) = (self.x.len(), self.y.len());
        if n < self.config.t0 || m < self.config.t0 {
            return Ok(Decision {
                kind: DecisionKind::Continue,
                n,
                m,
                ci_x: None,
                ci_y: None,
            });
        }
        let ci_x = self.interval(Arm::P)?;
        let ci_y = self.interval(Arm::Q)?;
        let decision = Decision {
            kind: classify(&ci_x, &ci_y, Some(self.config.delta)),
            n,
            m,
            ci_x: Some(ci_x),
            ci_y: Some(ci_y),
        };
        if decision.kind.is_terminal() {
            self.terminal = Some(decision);
        }
        Ok(decision)
    }

    /// Records `value` and evaluates the decision if a full stride of
    /// observations has accumulated.
    pub fn step(&mut self, arm: Arm, value: f64) -> Result<Decision> {
        self.push(arm, value)?;
        if self.pending >= self.config.stride {
            self.evaluate()
        } else {
            Ok(Decision {
                kind: DecisionKind::Continue,
                n: self.x.len(),
                m: self.y.len(),
                ci_x: None,
                ci_y: None,
            })
        }
    }

    /// Current interval for `arm`, recomputed only if the arm has new data.
    pub fn interval(&mut self, arm: Arm) -> Result<ConfidenceInterval> {
        let alpha = self.config.alpha;
        let (state, cache) = match arm {
            Arm::P => (&self.x, &mut self.ci_x),
            Arm::Q => (&self.y, &mut self.ci_y),
        };
        match cache {
            Some(ci) if ci.n == state.len() => Ok(*ci),
            _ => {
                let ci = confidence_interval_from(state, alpha, cache.as_ref())?;
                *cache = Some(ci);
                Ok(ci)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> SupportBounds {
        SupportBounds::unit()
    }

    fn ci(lo: f64, hi: f64) -> ConfidenceInterval {
        ConfidenceInterval {
            lo,
            hi,
            alpha: 0.1,
            n: 1,
            mu_hat: 0.5 * (lo + hi),
            clamped_lo: false,
            clamped_hi: false,
        }
    }

    #[test]
    fn union_lengths() {
        assert!((union_length(&ci(0.1, 0.3), &ci(0.1, 0.3)) - 0.2).abs() < 1e-15);
        assert!((union_length(&ci(0.0, 0.1), &ci(0.5, 0.6)) - 0.6).abs() < 1e-15);
        assert!((union_length(&ci(0.2, 0.8), &ci(0.4, 0.5)) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn decision_rules() {
        let tight = ci(0.4, 0.44);
        assert_eq!(classify(&tight, &tight, Some(0.1)), DecisionKind::H0);
        assert_eq!(classify(&ci(0.5, 0.6), &ci(0.1, 0.2), Some(0.1)), DecisionKind::H1Plus);
        assert_eq!(classify(&ci(0.1, 0.2), &ci(0.5, 0.6), Some(0.1)), DecisionKind::H1Minus);
        assert_eq!(classify(&ci(0.1, 0.5), &ci(0.4, 0.6), Some(0.1)), DecisionKind::Continue);
        assert_eq!(classify(&ci(0.1, 0.5), &ci(0.4, 0.6), None), DecisionKind::H0);
        // Touching endpoints count as intersecting.
        assert_eq!(classify(&ci(0.1, 0.4), &ci(0.4, 0.6), None), DecisionKind::H0);
    }

    #[test]
    fn config_validation() {
        assert!(TestConfig::anytime(0.1, 0.1, 0, 1.0, unit(), unit()).is_err());
        assert!(TestConfig::anytime(0.1, 0.0, 5, 1.0, unit(), unit()).is_err());
        assert!(TestConfig::anytime(1.0, 0.1, 5, 1.0, unit(), unit()).is_err());
        assert!(TestConfig::fixed(0.1, 0.1, 0, 3, 1.0, unit(), unit()).is_err());
        let c = TestConfig::anytime(0.1, 0.1, 5, 1.0, unit(), unit()).unwrap();
        assert!(c.with_stride(0).is_err());
        let f = TestConfig::fixed(0.1, 0.1, 3, 3, 1.0, unit(), unit()).unwrap();
        assert!(f.with_fixed_schedule(ScheduleKind::Anytime).is_err());
    }

    #[test]
    fn fixed_single_points_are_equal() {
        let config = TestConfig::fixed(0.1, 0.1, 1, 1, 1.0, unit(), unit()).unwrap();
        let d = fixed_time_decision(&[0.5], &[0.5], &config).unwrap();
        assert_eq!(d.kind, DecisionKind::H0);
        assert_eq!(d.ci_x, d.ci_y);
    }

    #[test]
    fn fixed_degenerate_samples_separate() {
        let config = TestConfig::fixed(0.1, 0.1, 200, 200, 1.0, unit(), unit()).unwrap();
        let d = fixed_time_decision(&[0.0; 200], &[1.0; 200], &config).unwrap();
        assert_eq!(d.kind, DecisionKind::H1Minus);
        let (cx, cy) = (d.ci_x.unwrap(), d.ci_y.unwrap());
        assert!(cx.hi < cy.lo);
        let d = fixed_time_decision(&[1.0; 200], &[0.0; 200], &config).unwrap();
        assert_eq!(d.kind, DecisionKind::H1Plus);
    }

    #[test]
    fn fixed_checks_inputs() {
        let config = TestConfig::fixed(0.1, 0.1, 2, 2, 1.0, unit(), unit()).unwrap();
        assert!(fixed_time_decision(&[], &[0.5], &config).is_err());
        assert!(fixed_time_decision(&[0.5], &[0.5, 0.5], &config).is_err());
        assert!(matches!(
            fixed_time_decision(&[0.5, 1.5], &[0.5, 0.5], &config),
            Err(Error::OutOfRange { .. })
        ));
        let anytime = TestConfig::anytime(0.1, 0.1, 2, 1.0, unit(), unit()).unwrap();
        assert!(fixed_time_decision(&[0.5], &[0.5], &anytime).is_err());
    }

    #[test]
    fn engine_waits_for_burn_in_on_both_arms() {
        let config = TestConfig::anytime(0.1, 0.1, 10, 1.0, unit(), unit()).unwrap();
        let mut engine = OverlapEngine::new(config).unwrap();
        // Arm P alone can never trigger a decision, however extreme.
        for _ in 0..50 {
            let d = engine.step(Arm::P, 0.0).unwrap();
            assert_eq!(d.kind, DecisionKind::Continue);
            assert!(d.ci_x.is_none());
        }
        let mut decision = None;
        for i in 1..=200 {
            let d = engine.step(Arm::Q, 1.0).unwrap();
            if i < 10 {
                assert_eq!(d.kind, DecisionKind::Continue);
                assert!(d.ci_y.is_none());
            }
            if d.kind.is_terminal() {
                decision = Some(d);
                break;
            }
        }
        let d = decision.expect("separated point masses must be decided");
        assert_eq!(d.kind, DecisionKind::H1Minus);
        assert_eq!(d.n, 50);
        assert!(d.m >= 10);
    }

    #[test]
    fn engine_freezes_after_a_decision() {
        let config = TestConfig::anytime(0.1, 0.1, 5, 1.0, unit(), unit()).unwrap();
        let mut engine = OverlapEngine::new(config).unwrap();
        let mut last = None;
        while !engine.is_terminal() && engine.len(Arm::P) < 200 {
            engine.step(Arm::P, 1.0).unwrap();
            last = Some(engine.step(Arm::Q, 0.0).unwrap());
        }
        assert_eq!(last.unwrap().kind, DecisionKind::H1Plus);
        assert_eq!(engine.terminal(), last.as_ref());
        let n = engine.len(Arm::P);
        assert_eq!(engine.step(Arm::P, 0.5), Err(Error::Frozen(DecisionKind::H1Plus)));
        assert_eq!(engine.evaluate(), Err(Error::Frozen(DecisionKind::H1Plus)));
        assert_eq!(engine.len(Arm::P), n);
    }

    #[test]
    fn engine_rejects_fixed_config() {
        let config = TestConfig::fixed(0.1, 0.1, 5, 5, 1.0, unit(), unit()).unwrap();
        assert!(OverlapEngine::new(config).is_err());
    }

    #[test]
    fn stride_defers_evaluation() {
        let config = TestConfig::anytime(0.1, 0.1, 5, 1.0, unit(), unit())
            .unwrap()
            .with_stride(4)
            .unwrap();
        let mut engine = OverlapEngine::new(config).unwrap();
        let mut decided_at = None;
        for i in 0..400 {
            let arm = if i % 2 == 0 { Arm::P } else { Arm::Q };
            let value = if arm == Arm::P { 1.0 } else { 0.0 };
            let d = engine.step(arm, value).unwrap();
            if d.kind.is_terminal() {
                decided_at = Some(i + 1);
                break;
            }
        }
        let at = decided_at.expect("point masses at 0 and 1 must separate");
        assert!(at >= 10);
        assert_eq!(at % 4, 0);
    }

    #[test]
    fn identical_streams_decide_identically() {
        let config = TestConfig::anytime(0.1, 0.1, 20, 1.0, unit(), unit()).unwrap();
        let run = || {
            let mut engine = OverlapEngine::new(config).unwrap();
            let mut k = 0u64;
            loop {
                k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = (k >> 11) as f64 / (1u64 << 53) as f64;
                let arm = if k % 2 == 0 { Arm::P } else { Arm::Q };
                let d = engine.step(arm, v).unwrap();
                if d.kind.is_terminal() || engine.len(Arm::P) + engine.len(Arm::Q) > 3000 {
                    return d;
                }
            }
        };
        assert_eq!(run(), run());
    }
}
