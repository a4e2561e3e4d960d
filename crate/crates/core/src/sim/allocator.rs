//! Adaptive sampling across several arms compared pairwise.
//!
//! Each unordered pair of arms gets its own [`OverlapEngine`]. A draw from
//! an arm is fed to every undecided engine containing it, so all undecided
//! engines hold the same history for a given arm.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::Distribution;
use crate::error::{param, Error, Result};
use crate::evalue::SupportBounds;
use crate::overlap::{Arm, Decision, DecisionKind, OverlapEngine, TestConfig};

/// Engine comparing arm `first` (as `P`) with arm `second` (as `Q`).
#[derive(Debug, Clone)]
pub struct PairEngine {
    pub first: usize,
    pub second: usize,
    pub engine: OverlapEngine,
}

impl PairEngine {
    fn side(&self, arm: usize) -> Option<Arm> {
        if arm == self.first {
            Some(Arm::P)
        } else if arm == self.second {
            Some(Arm::Q)
        } else {
            None
        }
    }
}

/// Picks the arm with the longest current interval among arms that still
/// take part in an undecided engine (lowest index on ties), and an
/// undecided engine containing it.
pub fn largest_ci_allocator(engines: &mut [PairEngine]) -> Result<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..engines.len() {
        if engines[i].engine.is_terminal() {
            continue;
        }
        for side in [Arm::P, Arm::Q] {
            let arm = match side {
                Arm::P => engines[i].first,
                Arm::Q => engines[i].second,
            };
            let length = engines[i].engine.interval(side)?.length();
            let better = match best {
                None => true,
                Some((best_arm, _, best_length)) => {
                    length > best_length || (length == best_length && arm < best_arm)
                }
            };
            if better {
                best = Some((arm, i, length));
            }
        }
    }
    best.map(|(arm, engine, _)| (arm, engine)).ok_or(Error::AllDecided)
}

/// All pairwise comparisons between `k` arms.
#[derive(Debug, Clone)]
pub struct Tournament {
    engines: Vec<PairEngine>,
    samples: Vec<usize>,
}

impl Tournament {
    /// One anytime engine per pair `i < j`, sharing `alpha`, `delta`, `t0`
    /// and `c`.
    pub fn new(bounds: &[SupportBounds], alpha: f64, delta: f64, t0: usize, c: f64) -> Result<Self> {
        if bounds.len() < 2 {
            return param("a tournament needs at least two arms");
        }
        let mut engines = Vec::new();
        for i in 0..bounds.len() {
            for j in i + 1..bounds.len() {
                let config = TestConfig::anytime(alpha, delta, t0, c, bounds[i], bounds[j])?;
                engines.push(PairEngine {
                    first: i,
                    second: j,
                    engine: OverlapEngine::new(config)?,
                });
            }
        }
        Ok(Tournament {
            engines,
            samples: vec![0; bounds.len()],
        })
    }

    pub fn engines(&self) -> &[PairEngine] {
        &self.engines
    }

    /// Draws recorded per arm.
    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn is_complete(&self) -> bool {
        self.engines.iter().all(|e| e.engine.is_terminal())
    }

    /// Arm to sample next, or [`Error::AllDecided`].
    pub fn next_arm(&mut self) -> Result<usize> {
        largest_ci_allocator(&mut self.engines).map(|(arm, _)| arm)
    }

    /// Feeds `value` from `arm` to every undecided engine containing it and
    /// returns the decisions this observation triggered, by engine index.
    pub fn feed(&mut self, arm: usize, value: f64) -> Result<Vec<(usize, Decision)>> {
        if arm >= self.samples.len() {
            return param(format!("no arm {arm}"));
        }
        let mut fed = false;
        let mut decided = Vec::new();
        for (i, pair) in self.engines.iter_mut().enumerate() {
            if pair.engine.is_terminal() {
                continue;
            }
            if let Some(side) = pair.side(arm) {
                let d = pair.engine.step(side, value)?;
                fed = true;
                if d.kind.is_terminal() {
                    decided.push((i, d));
                }
            }
        }
        if !fed {
            return param(format!("arm {arm} takes part in no undecided comparison"));
        }
        self.samples[arm] += 1;
        Ok(decided)
    }
}

/// Final state of a simulated tournament.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentOutcome {
    /// `(first, second, decision)` for every pair; `Continue` if undecided.
    pub decisions: Vec<(usize, usize, DecisionKind)>,
    pub samples: Vec<usize>,
}

/// Samples `arms` in batches of `batch` draws, always from the arm chosen
/// by [`largest_ci_allocator`], until every pair is decided or `max_samples`
/// draws have been made.
#[allow(clippy::too_many_arguments)]
pub fn run_tournament<R: Rng + ?Sized>(
    arms: &[Distribution],
    bounds: &[SupportBounds],
    alpha: f64,
    delta: f64,
    t0: usize,
    c: f64,
    batch: usize,
    max_samples: usize,
    rng: &mut R,
) -> Result<TournamentOutcome> {
    if arms.len() != bounds.len() {
        return param("one support bound per arm is needed");
    }
    if batch == 0 {
        return param("batch size must be at least 1");
    }
    let mut tournament = Tournament::new(bounds, alpha, delta, t0, c)?;
    let mut drawn = 0;
    'outer: while drawn < max_samples {
        let arm = match tournament.next_arm() {
            Ok(arm) => arm,
            Err(Error::AllDecided) => break,
            Err(e) => return Err(e),
        };
        for _ in 0..batch {
            tournament.feed(arm, arms[arm].sample(rng))?;
            drawn += 1;
            let still_open = tournament
                .engines()
                .iter()
                .any(|e| !e.engine.is_terminal() && e.side(arm).is_some());
            if !still_open || drawn >= max_samples {
                continue 'outer;
            }
        }
    }
    Ok(TournamentOutcome {
        decisions: tournament
            .engines()
            .iter()
            .map(|e| {
                let kind = e.engine.terminal().map_or(DecisionKind::Continue, |d| d.kind);
                (e.first, e.second, kind)
            })
            .collect(),
        samples: tournament.samples().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::harness::replication_rng;

    fn unit() -> SupportBounds {
        SupportBounds::unit()
    }

    #[test]
    fn picks_the_longest_interval() {
        let mut t = Tournament::new(&[unit(), unit()], 0.1, 0.1, 2, 1.0).unwrap();
        // Arm 0 gets more data, so its interval is shorter.
        for _ in 0..30 {
            t.feed(0, 0.5).unwrap();
        }
        for _ in 0..5 {
            t.feed(1, 0.5).unwrap();
        }
        assert_eq!(t.next_arm().unwrap(), 1);
        // With equal histories the lower index wins the tie.
        let mut t = Tournament::new(&[unit(), unit()], 0.1, 0.1, 2, 1.0).unwrap();
        assert_eq!(t.next_arm().unwrap(), 0);
    }

    #[test]
    fn decided_arms_are_skipped() {
        let mut t = Tournament::new(&[unit(), unit(), unit()], 0.1, 0.01, 5, 1.0).unwrap();
        // Arm 0 separates from both others; arms 1 and 2 stay tied.
        while !(t.engines()[0].engine.is_terminal() && t.engines()[1].engine.is_terminal()) {
            if !t.engines()[0].engine.is_terminal() || !t.engines()[1].engine.is_terminal() {
                t.feed(0, 0.0).unwrap();
            }
            t.feed(1, 1.0).unwrap();
            t.feed(2, 1.0).unwrap();
        }
        assert!(t.feed(0, 0.0).is_err());
        for _ in 0..200 {
            t.feed(1, 1.0).unwrap();
            t.feed(2, 1.0).unwrap();
        }
        // Arm 0 now has the longest interval but no open comparison.
        let arm0 = t.engines[0].engine.interval(Arm::P).unwrap().length();
        let arm1 = t.engines[2].engine.interval(Arm::P).unwrap().length();
        assert!(arm0 > arm1);
        assert_ne!(t.next_arm().unwrap(), 0);

        let mut t = Tournament::new(&[unit(), unit()], 0.1, 0.5, 5, 1.0).unwrap();
        while !t.is_complete() {
            t.feed(0, 0.0).unwrap();
            t.feed(1, 1.0).unwrap();
        }
        assert_eq!(t.next_arm(), Err(Error::AllDecided));
    }

    #[test]
    fn allocator_reports_completion() {
        let mut engines: Vec<PairEngine> = Vec::new();
        assert_eq!(largest_ci_allocator(&mut engines), Err(Error::AllDecided));
    }

    #[test]
    fn three_arm_tournament_orders_correctly() {
        let arms = [
            Distribution::Bernoulli { p: 0.6 },
            Distribution::Bernoulli { p: 0.85 },
            Distribution::Bernoulli { p: 0.9 },
        ];
        let bounds = [unit(); 3];
        let mut rng = replication_rng(99, 0);
        let out = run_tournament(&arms, &bounds, 0.1, 0.1, 20, 1.0, 16, 200_000, &mut rng).unwrap();
        for &(i, j, kind) in &out.decisions {
            assert_ne!(kind, DecisionKind::H1Plus, "pair ({i}, {j})");
        }
        assert_eq!(out.decisions[0].2, DecisionKind::H1Minus);
    }
}
