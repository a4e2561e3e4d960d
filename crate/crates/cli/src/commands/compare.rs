use std::io::Write;

use ci_overlap::error_bounds::error_bounds;
use ci_overlap::{fixed_time_decision, Arm, Decision, DecisionKind, OverlapEngine, TestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{default_t0, invalid, CompareArgs, ModeArg};
use crate::data::DataFile;
use crate::failure::{input, EXIT_INCONCLUSIVE, EXIT_OK};
use crate::report::{render_bounds, show_interval, to_json, CompareReport, Interleave, Outcome, VERSION};

/// Merges the two files into one arrival sequence.
fn interleave(
    x: &DataFile,
    y: &DataFile,
    seed: Option<u64>,
) -> anyhow::Result<(Interleave, Vec<(Arm, f64)>)> {
    match (x.has_order(), y.has_order(), seed) {
        (true, true, None) => {
            let mut rows: Vec<(f64, Arm, f64)> = x
                .rows
                .iter()
                .map(|r| (r.order.unwrap_or_default(), Arm::P, r.value))
                .chain(y.rows.iter().map(|r| (r.order.unwrap_or_default(), Arm::Q, r.value)))
                .collect();
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok((Interleave::OrderColumn, rows.into_iter().map(|(_, arm, v)| (arm, v)).collect()))
        }
        (false, false, _) | (true, true, Some(_)) => {
            let (xs, ys) = (x.single_series()?, y.single_series()?);
            let mut stream = Vec::with_capacity(xs.len() + ys.len());
            let (mut i, mut j) = (0, 0);
            let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
            while i < xs.len() || j < ys.len() {
                let take_x = if i == xs.len() {
                    false
                } else if j == ys.len() {
                    true
                } else {
                    match rng.as_mut() {
                        Some(rng) => rng.random_bool(0.5),
                        None => i <= j,
                    }
                };
                if take_x {
                    stream.push((Arm::P, xs[i]));
                    i += 1;
                } else {
                    stream.push((Arm::Q, ys[j]));
                    j += 1;
                }
            }
            let kind = match seed {
                Some(seed) => Interleave::Seeded { seed },
                None => Interleave::RoundRobin,
            };
            Ok((kind, stream))
        }
        _ => Err(input(format!(
            "either both or neither of {} and {} must carry an order column",
            x.name, y.name
        ))),
    }
}

/// Feeds `stream` to `engine` until a terminal decision. Returns the last
/// decision and, if terminal, the 1-based position where it was taken.
pub(super) fn replay(engine: &mut OverlapEngine, stream: &[(Arm, f64)]) -> anyhow::Result<(Decision, Option<usize>)> {
    let mut last = Decision {
        kind: DecisionKind::Continue,
        n: 0,
        m: 0,
        ci_x: None,
        ci_y: None,
    };
    for (i, &(arm, value)) in stream.iter().enumerate() {
        last = engine.step(arm, value).map_err(invalid)?;
        if last.kind.is_terminal() {
            return Ok((last, Some(i + 1)));
        }
    }
    Ok((last, None))
}

/// Outcome at the end of the data; for an undecided run the intervals
/// are filled in from the current state once the burn-in is over.
pub(super) fn outcome(engine: &mut OverlapEngine, last: Decision, stopped_at: Option<usize>) -> anyhow::Result<Outcome> {
    let mut last = last;
    let t0 = engine.config().t0;
    if !last.kind.is_terminal() && engine.len(Arm::P) >= t0 && engine.len(Arm::Q) >= t0 {
        last.ci_x = Some(engine.interval(Arm::P).map_err(invalid)?);
        last.ci_y = Some(engine.interval(Arm::Q).map_err(invalid)?);
    }
    Ok(Outcome::from_decision(&last, stopped_at))
}

pub(super) fn run(args: &CompareArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let x = DataFile::read(&args.x)?;
    let y = DataFile::read(&args.y)?;
    x.check_bounds(args.bounds_x)?;
    y.check_bounds(args.bounds_y)?;
    let (interleave_kind, config, outcome) = match args.mode {
        ModeArg::Fixed => {
            let (xs, ys) = (x.single_series()?, y.single_series()?);
            if xs.is_empty() || ys.is_empty() {
                return Err(input("fixed mode needs at least one row in each file"));
            }
            let config = TestConfig::fixed(
                args.alpha,
                args.delta,
                xs.len(),
                ys.len(),
                args.c,
                args.bounds_x,
                args.bounds_y,
            )
            .and_then(|c| c.with_fixed_schedule(args.schedule.into()))
            .map_err(invalid)?;
            let d = fixed_time_decision(&xs, &ys, &config).map_err(invalid)?;
            (Interleave::None, config, Outcome::from_decision(&d, None))
        }
        ModeArg::Anytime => {
            let t0 = default_t0(args.t0, args.alpha, args.delta)?;
            let config = TestConfig::anytime(args.alpha, args.delta, t0, args.c, args.bounds_x, args.bounds_y)
                .map_err(invalid)?;
            let (kind, stream) = interleave(&x, &y, args.seed_order)?;
            let mut engine = OverlapEngine::new(config).map_err(invalid)?;
            let (last, stopped_at) = replay(&mut engine, &stream)?;
            (kind, config, outcome(&mut engine, last, stopped_at)?)
        }
    };
    let bounds = error_bounds(&config).map_err(invalid)?;
    let report = CompareReport {
        command: "compare".to_string(),
        version: VERSION.to_string(),
        x: args.x.display().to_string(),
        y: args.y.display().to_string(),
        interleave: interleave_kind,
        config,
        outcome,
        bounds: bounds.into(),
    };
    if args.json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        let o = &report.outcome;
        writeln!(out, "decision  {} ({})", o.decision, o.relation)?;
        writeln!(out, "n, m      {}, {}", o.n, o.m)?;
        if let Some(at) = o.stopped_at {
            writeln!(out, "stopped   after {at} observations")?;
        }
        writeln!(out, "x         {}", show_interval(&o.ci_x))?;
        writeln!(out, "y         {}", show_interval(&o.ci_y))?;
        write!(out, "{}", render_bounds(&bounds))?;
    }
    Ok(if report.outcome.decision.is_terminal() {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    })
}
