//! The betting e-process for the mean of a bounded stream.
//!
//! For observations `x_1..x_n` on `[a, b]` and predictable weights `w_t`,
//!
//! ```text
//! E_n(z) = ½ · max( Π (1 + w_t (x_t - z)),  Π (1 - w_t (x_t - z)) )
//! ```
//!
//! is an e-variable for the null "the mean equals `z`", and under that null
//! it is a non-negative supermartingale in `n`. `E_n` is convex in `z` on
//! the support; the first product decreases in `z` and the second
//! increases, so the minimiser `μ̂` is where the two products cross.
//! `log E_n` is not convex (it is concave on each side of `μ̂`), but it
//! shares the level sets of `E_n`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::roots::{find_root, Start};
use crate::weights::{RunningVariance, WeightSchedule};

/// Closed support `[a, b]` of an observed variable, with `a < b`.
///
/// Serialized as the pair `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct SupportBounds {
    a: f64,
    b: f64,
}

impl SupportBounds {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return param(format!("support bounds must be finite with a < b, got [{a}, {b}]"));
        }
        Ok(SupportBounds { a, b })
    }

    pub fn unit() -> Self {
        SupportBounds { a: 0.0, b: 1.0 }
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }
}

impl TryFrom<(f64, f64)> for SupportBounds {
    type Error = Error;

    fn try_from((a, b): (f64, f64)) -> Result<Self> {
        SupportBounds::new(a, b)
    }
}

impl From<SupportBounds> for (f64, f64) {
    fn from(bounds: SupportBounds) -> Self {
        (bounds.a, bounds.b)
    }
}

impl std::fmt::Display for SupportBounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// Logarithms of the two one-sided wealth products at a point `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEValue {
    /// `Σ log(1 + w_t (x_t - z))`
    pub log_plus: f64,
    /// `Σ log(1 - w_t (x_t - z))`
    pub log_minus: f64,
    /// `max(log_plus, log_minus) - log 2`
    pub log_e: f64,
}

impl LogEValue {
    pub fn from_sums(log_plus: f64, log_minus: f64) -> Self {
        LogEValue {
            log_plus,
            log_minus,
            log_e: log_plus.max(log_minus) - std::f64::consts::LN_2,
        }
    }

    pub fn e_value(&self) -> f64 {
        self.log_e.exp()
    }
}

/// `(Σ w/(1 + w(b-a)), Σ w/(1 - w(b-a)))`: the smallest and largest slope
/// magnitude of `log E_n` away from its minimiser.
pub fn slope_sums(weights: &[f64], width: f64) -> (f64, f64) {
    weights.iter().fold((0.0, 0.0), |(lo, hi), &w| {
        let s = w * width;
        (lo + w / (1.0 + s), hi + w / (1.0 - s))
    })
}

// Factors are bounded below by 1 - w(b-a) >= 2^-53, so a product of this
// many factors cannot underflow before its logarithm is taken.
const CHUNK: usize = 16;

#[inline]
fn log_product(xs: &[f64], ws: &[f64], z: f64, sign: f64) -> f64 {
    let mut total = 0.0;
    for (xc, wc) in xs.chunks(CHUNK).zip(ws.chunks(CHUNK)) {
        let mut prod = 1.0;
        for (&x, &w) in xc.iter().zip(wc) {
            prod *= 1.0 + sign * w * (x - z);
        }
        total += prod.ln();
    }
    total
}

/// Log-sums of both products on a fixed grid of candidate means, updated in
/// `O(G)` per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSumGrid {
    zs: Vec<f64>,
    log_plus: Vec<f64>,
    log_minus: Vec<f64>,
}

impl LogSumGrid {
    pub fn new(bounds: SupportBounds, points: usize) -> Result<Self> {
        if points < 2 {
            return param("a z-grid needs at least 2 points");
        }
        let step = bounds.width() / (points - 1) as f64;
        let mut zs: Vec<f64> = (0..points).map(|i| bounds.lower() + i as f64 * step).collect();
        zs[points - 1] = bounds.upper();
        Ok(LogSumGrid {
            zs,
            log_plus: vec![0.0; points],
            log_minus: vec![0.0; points],
        })
    }

    fn push(&mut self, x: f64, w: f64) {
        for ((z, lp), lm) in self.zs.iter().zip(&mut self.log_plus).zip(&mut self.log_minus) {
            let d = w * (x - z);
            *lp += d.ln_1p();
            *lm += (-d).ln_1p();
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.zs
    }

    pub fn log_e(&self, index: usize) -> LogEValue {
        LogEValue::from_sums(self.log_plus[index], self.log_minus[index])
    }

    /// Index of the grid point with the smallest `log E`.
    pub(crate) fn argmin(&self) -> usize {
        (0..self.zs.len())
            .min_by(|&i, &j| {
                let ei = self.log_plus[i].max(self.log_minus[i]);
                let ej = self.log_plus[j].max(self.log_minus[j]);
                ei.total_cmp(&ej)
            })
            .unwrap_or(0)
    }

    /// Adjacent grid points around the last index in `range` where
    /// `pred(log_plus, log_minus)` holds, assuming it holds on a prefix.
    pub(crate) fn bracket<F>(&self, from: usize, to: usize, pred: F) -> (f64, f64)
    where
        F: Fn(f64, f64) -> bool,
    {
        let mut last = from;
        for i in from..=to {
            if pred(self.log_plus[i], self.log_minus[i]) {
                last = i;
            } else {
                break;
            }
        }
        let next = (last + 1).min(self.zs.len() - 1);
        (self.zs[last], self.zs[next])
    }
}

/// Observation and weight history of one stream, with running moments.
///
/// The weight paired with each observation is fixed by the schedule before
/// the observation is recorded.
#[derive(Debug, Clone)]
pub struct EProcessState {
    schedule: WeightSchedule,
    bounds: SupportBounds,
    xs: Vec<f64>,
    ws: Vec<f64>,
    moments: RunningVariance,
    grid: Option<LogSumGrid>,
}

impl EProcessState {
    pub fn new(schedule: WeightSchedule) -> Self {
        let bounds = schedule.bounds();
        EProcessState {
            schedule,
            bounds,
            xs: Vec::new(),
            ws: Vec::new(),
            moments: RunningVariance::for_bounds(bounds),
            grid: None,
        }
    }

    /// A state holding an explicit `(x_t, w_t)` history. Later observations
    /// draw their weights from `schedule`.
    pub fn from_history(schedule: WeightSchedule, history: &[(f64, f64)]) -> Result<Self> {
        let mut state = Self::new(schedule);
        let width = state.bounds.width();
        for &(x, w) in history {
            state.bounds.check(x)?;
            let scaled = w * width;
            if !(scaled > 0.0 && scaled < 1.0) {
                return param(format!("weight {w} violates 0 < w(b-a) < 1"));
            }
            state.record(x, w);
        }
        Ok(state)
    }

    /// Maintains a `points`-point grid of log-sums alongside the history.
    pub fn with_grid(mut self, points: usize) -> Result<Self> {
        let mut grid = LogSumGrid::new(self.bounds, points)?;
        for (&x, &w) in self.xs.iter().zip(&self.ws) {
            grid.push(x, w);
        }
        self.grid = Some(grid);
        Ok(self)
    }

    /// Weight that the next observation will receive.
    pub fn next_weight(&self) -> f64 {
        self.schedule.weight(self.xs.len() + 1, self.moments.variance())
    }

    /// Records `x`, returning the weight it was paired with.
    pub fn observe(&mut self, x: f64) -> Result<f64> {
        self.bounds.check(x)?;
        let w = self.next_weight();
        self.record(x, w);
        Ok(w)
    }

    fn record(&mut self, x: f64, w: f64) {
        self.xs.push(x);
        self.ws.push(w);
        self.moments.update(x);
        if let Some(grid) = self.grid.as_mut() {
            grid.push(x, w);
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn bounds(&self) -> SupportBounds {
        self.bounds
    }

    pub fn schedule(&self) -> &WeightSchedule {
        &self.schedule
    }

    pub fn observations(&self) -> &[f64] {
        &self.xs
    }

    pub fn weights(&self) -> &[f64] {
        &self.ws
    }

    pub fn grid(&self) -> Option<&LogSumGrid> {
        self.grid.as_ref()
    }

    /// Running mean; `NaN` before the first observation.
    pub fn mean(&self) -> f64 {
        if self.xs.is_empty() {
            f64::NAN
        } else {
            self.moments.mean()
        }
    }

    /// Empirical variance `σ̂²_n` (the prior before any observation).
    pub fn variance(&self) -> f64 {
        self.moments.variance()
    }

    pub fn moments(&self) -> &RunningVariance {
        &self.moments
    }

    pub(crate) fn log_plus(&self, z: f64) -> f64 {
        log_product(&self.xs, &self.ws, z, 1.0)
    }

    pub(crate) fn log_minus(&self, z: f64) -> f64 {
        log_product(&self.xs, &self.ws, z, -1.0)
    }

    /// Evaluates both log-products at `z ∈ [a, b]`.
    pub fn log_eprocess_at(&self, z: f64) -> Result<LogEValue> {
        if !self.bounds.contains(z) {
            return Err(Error::Domain {
                z,
                a: self.bounds.lower(),
                b: self.bounds.upper(),
            });
        }
        Ok(LogEValue::from_sums(self.log_plus(z), self.log_minus(z)))
    }

    /// Minimiser `μ̂` of `log E_n` on `[a, b]`, to within `1e-10 (b - a)`.
    pub fn minimizer(&self) -> Result<f64> {
        self.minimizer_from(None)
    }

    pub(crate) fn minimizer_from(&self, hint: Option<f64>) -> Result<f64> {
        if self.xs.is_empty() {
            return param("the minimiser needs at least one observation");
        }
        let (a, b) = (self.bounds.lower(), self.bounds.upper());
        let width = self.bounds.width();
        // log_plus - log_minus is strictly decreasing in z.
        let gap = |z: f64| self.log_plus(z) - self.log_minus(z);
        if gap(a) <= 0.0 {
            return Ok(a);
        }
        if gap(b) > 0.0 {
            return Ok(b);
        }
        let start = match (hint, self.grid.as_ref()) {
            (Some(at), _) => Start::Hint {
                at,
                step: 1e-4 * width,
            },
            (None, Some(grid)) => {
                let k = grid.argmin();
                let zs = grid.points();
                Start::Bracket(zs[k.saturating_sub(1)], zs[(k + 1).min(zs.len() - 1)])
            }
            (None, None) => Start::Cold,
        };
        let s = find_root(gap, a, b, start, 1e-10 * width, 200);
        Ok(0.5 * (s.left + s.right))
    }

    /// Envelope `(Σ w/(1+w(b-a)), Σ w/(1-w(b-a)))` for `|d/dz log E_n(z)|`
    /// at every `z ≠ μ̂` in the support.
    pub fn log_derivative_bounds(&self) -> (f64, f64) {
        slope_sums(&self.ws, self.bounds.width())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn anytime_unit() -> WeightSchedule {
        WeightSchedule::anytime(0.1, 1.0, 20, SupportBounds::unit()).unwrap()
    }

    fn constant(w: f64) -> WeightSchedule {
        WeightSchedule::constant(w, SupportBounds::unit()).unwrap()
    }

    // Independent oracle: plain sums of logarithms.
    fn naive(state: &EProcessState, z: f64) -> f64 {
        let (lp, lm) = state
            .observations()
            .iter()
            .zip(state.weights())
            .fold((0.0, 0.0), |(lp, lm), (&x, &w)| {
                (lp + (1.0 + w * (x - z)).ln(), lm + (1.0 - w * (x - z)).ln())
            });
        lp.max(lm) - std::f64::consts::LN_2
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> EProcessState {
        let mut s = EProcessState::new(anytime_unit());
        for _ in 0..n {
            s.observe(rng.random::<f64>()).unwrap();
        }
        s
    }

    #[test]
    fn bounds_validation() {
        assert!(SupportBounds::new(1.0, 1.0).is_err());
        assert!(SupportBounds::new(2.0, 1.0).is_err());
        assert!(SupportBounds::new(f64::NAN, 1.0).is_err());
        assert!(SupportBounds::new(-1.0, 1.0).is_ok());
    }

    #[test]
    fn observe_updates_moments() {
        let mut s = EProcessState::new(anytime_unit());
        s.observe(0.5).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.mean(), 0.5);
        assert_eq!(s.variance(), 0.0);

        let mut s = EProcessState::new(anytime_unit());
        s.observe(0.0).unwrap();
        s.observe(1.0).unwrap();
        assert_eq!(s.mean(), 0.5);
        assert_eq!(s.variance(), 0.25);
    }

    #[test]
    fn observe_rejects_out_of_range() {
        let mut s = EProcessState::new(anytime_unit());
        let err = s.observe(1.5).unwrap_err();
        assert_eq!(err, Error::OutOfRange { x: 1.5, a: 0.0, b: 1.0 });
        assert!(s.is_empty());
    }

    #[test]
    fn weights_are_predictable() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
        let schedule = WeightSchedule::anytime(0.1, 1.0, 50, SupportBounds::unit()).unwrap();

        let mut whole = EProcessState::new(schedule);
        for &x in &xs {
            whole.observe(x).unwrap();
        }
        // Replaying in two phases and announcing the weight before each
        // observation must reproduce the same sequence.
        let mut phased = EProcessState::new(schedule);
        for &x in &xs[..120] {
            phased.observe(x).unwrap();
        }
        let mut announced = Vec::new();
        for &x in &xs[120..] {
            announced.push(phased.next_weight());
            phased.observe(x).unwrap();
        }
        assert_eq!(whole.weights(), phased.weights());
        assert_eq!(&whole.weights()[120..], &announced[..]);
    }

    #[test]
    fn running_moments_match_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_state(&mut rng, 500);
        let xs = s.observations();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert_relative_eq!(s.mean(), mean, max_relative = 1e-12);
        assert_relative_eq!(s.variance(), var, max_relative = 1e-12);
    }

    #[test]
    fn empty_product() {
        let s = EProcessState::new(anytime_unit());
        for z in [0.0, 0.3, 1.0] {
            let v = s.log_eprocess_at(z).unwrap();
            assert_eq!(v.log_plus, 0.0);
            assert_eq!(v.log_minus, 0.0);
            assert_eq!(v.log_e, -std::f64::consts::LN_2);
        }
    }

    #[test]
    fn unit_factors_at_the_observation() {
        let s = EProcessState::from_history(constant(0.4), &[(0.5, 0.4)]).unwrap();
        let v = s.log_eprocess_at(0.5).unwrap();
        assert_eq!(v.log_e, -std::f64::consts::LN_2);
    }

    #[test]
    fn two_point_product() {
        let s = EProcessState::from_history(constant(0.5), &[(0.2, 0.5), (0.8, 0.5)]).unwrap();
        let e = s.log_eprocess_at(0.3).unwrap().e_value();
        // 0.5 · max(0.95 · 1.25, 1.05 · 0.75)
        let oracle = 0.5 * f64::max(0.95 * 1.25, 1.05 * 0.75);
        assert_relative_eq!(oracle, 0.59375, epsilon = 1e-15);
        assert_relative_eq!(e, oracle, max_relative = 1e-14);
    }

    #[test]
    fn evaluation_outside_support_is_rejected() {
        let s = EProcessState::new(anytime_unit());
        assert!(matches!(s.log_eprocess_at(-0.1), Err(Error::Domain { .. })));
        assert!(matches!(s.log_eprocess_at(1.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn from_history_validates() {
        assert!(EProcessState::from_history(constant(0.5), &[(0.2, 1.0)]).is_err());
        assert!(EProcessState::from_history(constant(0.5), &[(0.2, 0.0)]).is_err());
        assert!(EProcessState::from_history(constant(0.5), &[(1.2, 0.5)]).is_err());
    }

    #[test]
    fn chunked_products_match_naive_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = random_state(&mut rng, 1000);
        for i in 0..=20 {
            let z = i as f64 / 20.0;
            assert_relative_eq!(s.log_eprocess_at(z).unwrap().log_e, naive(&s, z), epsilon = 1e-10);
        }
    }

    #[test]
    fn minimizer_of_single_point() {
        for w in [0.1, 0.5, 0.9] {
            let s = EProcessState::from_history(constant(w), &[(0.7, w)]).unwrap();
            assert_relative_eq!(s.minimizer().unwrap(), 0.7, epsilon = 1e-9);
        }
    }

    #[test]
    fn minimizer_of_symmetric_data() {
        let data = [0.1, 0.9, 0.3, 0.7, 0.5, 0.2, 0.8];
        let history: Vec<(f64, f64)> = data.iter().map(|&x| (x, 0.3)).collect();
        let s = EProcessState::from_history(constant(0.3), &history).unwrap();
        assert_relative_eq!(s.minimizer().unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn minimizer_needs_data() {
        let s = EProcessState::new(anytime_unit());
        assert!(s.minimizer().is_err());
    }

    #[test]
    fn minimizer_matches_grid_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(&mut rng, 20);
        let grid = 1_000_000;
        let step = 1.0 / grid as f64;
        let (mut best_z, mut best) = (0.0, f64::INFINITY);
        for i in 0..=grid {
            let z = i as f64 * step;
            let v = naive(&s, z);
            if v < best {
                best = v;
                best_z = z;
            }
        }
        assert!((s.minimizer().unwrap() - best_z).abs() <= step);
    }

    #[test]
    fn derivative_bounds_single_weight() {
        let s = EProcessState::from_history(constant(0.5), &[(0.3, 0.5)]).unwrap();
        let (lo, hi) = s.log_derivative_bounds();
        assert_relative_eq!(lo, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(hi, 1.0, epsilon = 1e-15);

        let s = EProcessState::from_history(constant(1e-9), &[(0.3, 1e-12), (0.6, 1e-12)]).unwrap();
        let (lo, hi) = s.log_derivative_bounds();
        assert!(lo < 1e-11 && hi < 1e-11);
    }

    #[test]
    fn grid_tracks_exact_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut s = EProcessState::new(anytime_unit()).with_grid(101).unwrap();
        for _ in 0..300 {
            s.observe(rng.random::<f64>()).unwrap();
        }
        let grid = s.grid().unwrap().clone();
        for (i, &z) in grid.points().iter().enumerate() {
            let exact = s.log_eprocess_at(z).unwrap();
            let cached = grid.log_e(i);
            assert_relative_eq!(cached.log_plus, exact.log_plus, epsilon = 1e-9);
            assert_relative_eq!(cached.log_minus, exact.log_minus, epsilon = 1e-9);
        }
        let plain = {
            let mut p = EProcessState::new(anytime_unit());
            for &x in s.observations() {
                p.observe(x).unwrap();
            }
            p
        };
        assert!((plain.minimizer().unwrap() - s.minimizer().unwrap()).abs() <= 1e-9);
    }
}
