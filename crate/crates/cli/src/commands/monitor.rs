use std::io::{BufRead, Write};

use ci_overlap::error_bounds::error_bounds;
use ci_overlap::{Arm, Decision, DecisionKind, OverlapEngine, SupportBounds, TestConfig};
use serde::{Deserialize, Serialize};

use super::compare::outcome;
use super::{default_t0, invalid, MonitorArgs};
use crate::failure::{input, Failure, EXIT_INCONCLUSIVE, EXIT_OK};
use crate::report::{MonitorReport, MonitorStatus, VERSION};

/// Contents of the `--config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorConfig {
    pub alpha: f64,
    pub delta: f64,
    /// Burn-in per arm; the heuristic for `alpha` and `delta` when absent.
    #[serde(default)]
    pub t0: Option<usize>,
    pub c: f64,
    pub bounds_p: SupportBounds,
    pub bounds_q: SupportBounds,
    #[serde(default)]
    pub stride: Option<usize>,
}

impl MonitorConfig {
    pub fn test_config(&self) -> anyhow::Result<TestConfig> {
        let t0 = default_t0(self.t0, self.alpha, self.delta)?;
        TestConfig::anytime(self.alpha, self.delta, t0, self.c, self.bounds_p, self.bounds_q)
            .and_then(|c| c.with_stride(self.stride.unwrap_or(1)))
            .map_err(invalid)
    }
}

fn parse_line(line: usize, text: &str) -> anyhow::Result<(Arm, f64)> {
    let malformed = || input(format!("stdin:{line}: expected `P,<value>` or `Q,<value>`, got `{text}`"));
    let (arm, value) = text.split_once(',').ok_or_else(malformed)?;
    let arm = match arm.trim() {
        "P" => Arm::P,
        "Q" => Arm::Q,
        _ => return Err(malformed()),
    };
    let value: f64 = value.trim().parse().map_err(|_| malformed())?;
    if !value.is_finite() {
        return Err(malformed());
    }
    Ok((arm, value))
}

fn emit<T: Serialize>(out: &mut dyn Write, record: &T) -> anyhow::Result<()> {
    writeln!(out, "{}", serde_json::to_string(record)?)?;
    out.flush()?;
    Ok(())
}

pub(super) fn run(args: &MonitorArgs, stdin: &mut dyn BufRead, out: &mut dyn Write) -> anyhow::Result<i32> {
    let name = args.config.display().to_string();
    let text = std::fs::read_to_string(&args.config).map_err(|e| input(format!("{name}: {e}")))?;
    let config: MonitorConfig = serde_json::from_str(&text).map_err(|e| input(format!("{name}: {e}")))?;
    let config = config.test_config()?;
    let mut engine = OverlapEngine::new(config).map_err(invalid)?;
    let bounds = error_bounds(&config).map_err(invalid)?;
    let mut last = Decision {
        kind: DecisionKind::Continue,
        n: 0,
        m: 0,
        ci_x: None,
        ci_y: None,
    };
    let mut position = 0;
    let mut decided_at = None;
    for (index, text) in stdin.lines().enumerate() {
        let line = index + 1;
        let text = text.map_err(|e| input(format!("stdin:{line}: {e}")))?;
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(d) = engine.terminal() {
            return Err(Failure::Protocol(format!(
                "stdin:{line}: input after the final decision {}",
                d.kind
            ))
            .into());
        }
        let (arm, value) = parse_line(line, text)?;
        if !config.bounds(arm).contains(value) {
            return Err(input(format!(
                "stdin:{line}: value {value} is outside the bounds {} of {arm}",
                config.bounds(arm)
            )));
        }
        last = engine.step(arm, value).map_err(invalid)?;
        position += 1;
        emit(
            out,
            &MonitorStatus {
                line,
                arm,
                value,
                n: last.n,
                m: last.m,
                decision: last.kind,
                ci_x: last.ci_x,
                ci_y: last.ci_y,
            },
        )?;
        if last.kind.is_terminal() {
            decided_at = Some(position);
            emit(out, &final_report(&mut engine, last, decided_at, bounds)?)?;
        }
    }
    if decided_at.is_some() {
        return Ok(EXIT_OK);
    }
    emit(out, &final_report(&mut engine, last, None, bounds)?)?;
    Ok(EXIT_INCONCLUSIVE)
}

fn final_report(
    engine: &mut OverlapEngine,
    last: Decision,
    stopped_at: Option<usize>,
    bounds: ci_overlap::ErrorBounds,
) -> anyhow::Result<MonitorReport> {
    Ok(MonitorReport {
        command: "monitor".to_string(),
        version: VERSION.to_string(),
        config: *engine.config(),
        outcome: outcome(engine, last, stopped_at)?,
        bounds: bounds.into(),
    })
}
