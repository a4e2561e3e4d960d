use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::settings::SettingSpec;
use crate::error::{param, Result};
use crate::error_bounds::{error_bounds, ErrorBounds};
use crate::overlap::{fixed_time_decision, Arm, DecisionKind, Mode, OverlapEngine, TestConfig};

/// Test parameters shared by every setting of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub alpha: f64,
    pub delta: f64,
    pub c: f64,
    pub t0: usize,
    pub mode: Mode,
    /// Observations ingested between two anytime evaluations.
    pub batch: usize,
    /// Total draws after which an anytime run is abandoned as undecided.
    pub max_samples: usize,
}

impl SimConfig {
    pub fn anytime(alpha: f64, delta: f64, c: f64, t0: usize) -> Self {
        SimConfig {
            alpha,
            delta,
            c,
            t0,
            mode: Mode::Anytime,
            batch: 1,
            max_samples: 1_000_000,
        }
    }

    pub fn fixed(alpha: f64, delta: f64, c: f64, n: usize, m: usize) -> Self {
        SimConfig {
            alpha,
            delta,
            c,
            t0: 1,
            mode: Mode::Fixed { n, m },
            batch: 1,
            max_samples: n + m,
        }
    }

    pub fn test_config(&self, setting: &SettingSpec) -> Result<TestConfig> {
        let config = match self.mode {
            Mode::Anytime => TestConfig::anytime(
                self.alpha,
                self.delta,
                self.t0,
                self.c,
                setting.bounds_p,
                setting.bounds_q,
            )?,
            Mode::Fixed { n, m } => TestConfig::fixed(
                self.alpha,
                self.delta,
                n,
                m,
                self.c,
                setting.bounds_p,
                setting.bounds_q,
            )?,
        };
        config.with_stride(self.batch)
    }
}

/// Outcome of one simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub decision: DecisionKind,
    pub n: usize,
    pub m: usize,
}

/// Random stream for replication `rep_index` of a run seeded by `seed`.
pub fn replication_rng(seed: u64, rep_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep_index);
    rng
}

/// Runs one replication. Anytime runs alternate `P, Q, P, Q, ...`.
pub fn run_replication(
    setting: &SettingSpec,
    config: &SimConfig,
    seed: u64,
    rep_index: u64,
) -> Result<Replication> {
    let test = config.test_config(setting)?;
    let mut rng = replication_rng(seed, rep_index);
    match test.mode {
        Mode::Fixed { n, m } => {
            let xs: Vec<f64> = (0..n).map(|_| setting.dist_p.sample(&mut rng)).collect();
            let ys: Vec<f64> = (0..m).map(|_| setting.dist_q.sample(&mut rng)).collect();
            let d = fixed_time_decision(&xs, &ys, &test)?;
            Ok(Replication {
                decision: d.kind,
                n,
                m,
            })
        }
        Mode::Anytime => {
            let mut engine = OverlapEngine::new(test)?;
            let mut arm = Arm::P;
            let mut decision = DecisionKind::Continue;
            for _ in 0..config.max_samples {
                let dist = match arm {
                    Arm::P => &setting.dist_p,
                    Arm::Q => &setting.dist_q,
                };
                let d = engine.step(arm, dist.sample(&mut rng))?;
                arm = arm.other();
                if d.kind.is_terminal() {
                    decision = d.kind;
                    break;
                }
            }
            Ok(Replication {
                decision,
                n: engine.len(Arm::P),
                m: engine.len(Arm::Q),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub lower: f64,
    pub equal: f64,
    pub larger: f64,
    pub undecided: f64,
}

/// Mean and standard deviation of a stopping count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopStats {
    pub mean: f64,
    pub sd: f64,
}

impl StopStats {
    fn of(values: impl Iterator<Item = f64> + Clone) -> StopStats {
        let count = values.clone().count() as f64;
        let mean = values.clone().sum::<f64>() / count;
        let var = if count > 1.0 {
            values.map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        StopStats { mean, sd: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub setting: SettingSpec,
    pub config: SimConfig,
    pub reps: usize,
    pub seed: u64,
    pub frequencies: Frequencies,
    /// Total draws `n + m` at the decision (anytime runs only).
    pub stop_total: Option<StopStats>,
    /// Draws per arm, `(n + m) / 2`, at the decision (anytime runs only).
    pub stop_per_arm: Option<StopStats>,
    pub bounds: ErrorBounds,
}

fn aggregate(
    setting: &SettingSpec,
    config: &SimConfig,
    seed: u64,
    runs: &[Replication],
) -> Result<McReport> {
    let reps = runs.len();
    let share = |kind: DecisionKind| runs.iter().filter(|r| r.decision == kind).count() as f64 / reps as f64;
    let frequencies = Frequencies {
        lower: share(DecisionKind::H1Minus),
        equal: share(DecisionKind::H0),
        larger: share(DecisionKind::H1Plus),
        undecided: share(DecisionKind::Continue),
    };
    let (stop_total, stop_per_arm) = match config.mode {
        Mode::Anytime => {
            let totals = runs.iter().map(|r| (r.n + r.m) as f64);
            (
                Some(StopStats::of(totals.clone())),
                Some(StopStats::of(totals.map(|t| 0.5 * t))),
            )
        }
        Mode::Fixed { .. } => (None, None),
    };
    Ok(McReport {
        setting: setting.clone(),
        config: *config,
        reps,
        seed,
        frequencies,
        stop_total,
        stop_per_arm,
        bounds: error_bounds(&config.test_config(setting)?)?,
    })
}

/// Runs `reps` replications of every setting on `threads` worker threads.
/// The result depends only on the settings, `config`, `reps` and `seed`.
pub fn monte_carlo_table(
    settings: &[SettingSpec],
    config: &SimConfig,
    reps: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<McReport>> {
    if reps == 0 {
        return param("at least one replication is needed");
    }
    if config.batch == 0 {
        return param("batch size must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| crate::Error::Parameter(format!("cannot start worker threads: {e}")))?;
    settings
        .iter()
        .map(|setting| {
            // Every replication owns its random stream, so the collected
            // order and values do not depend on scheduling.
            let runs: Vec<Replication> = pool.install(|| {
                (0..reps as u64)
                    .into_par_iter()
                    .map(|rep| run_replication(setting, config, seed, rep))
                    .collect::<Result<Vec<_>>>()
            })?;
            aggregate(setting, config, seed, &runs)
        })
        .collect()
}
