use std::io::Write;

use ci_overlap::sim::{builtin, builtin_settings, monte_carlo_table, McReport, SimConfig, BUILTIN_NAMES};
use ci_overlap::Mode;

use super::{default_t0, invalid, ModeArg, SimulateArgs};
use crate::failure::input;
use crate::report::{render_bounds, to_json, SimulateReport, TYPE1_READING, VERSION};

fn render(report: &McReport) -> String {
    let f = &report.frequencies;
    let mut out = format!(
        "setting {}  reps {}  seed {}\n  lower {:.4}  equal {:.4}  larger {:.4}  undecided {:.4}\n",
        report.setting.name, report.reps, report.seed, f.lower, f.equal, f.larger, f.undecided
    );
    if let (Some(total), Some(arm)) = (report.stop_total, report.stop_per_arm) {
        out.push_str(&format!(
            "  stop n+m {:.1} (sd {:.1})  per arm {:.1} (sd {:.1})\n",
            total.mean, total.sd, arm.mean, arm.sd
        ));
    }
    for line in render_bounds(&report.bounds).lines() {
        out.push_str(&format!("  {line}\n"));
    }
    out
}

pub(super) fn run(args: &SimulateArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let settings = if args.setting == "all" {
        builtin_settings()
    } else {
        vec![builtin(&args.setting).ok_or_else(|| {
            input(format!(
                "unknown setting `{}`; choose one of {} or all",
                args.setting,
                BUILTIN_NAMES.join(", ")
            ))
        })?]
    };
    let config = match args.mode {
        ModeArg::Anytime => SimConfig {
            batch: args.batch,
            max_samples: args.max_samples,
            ..SimConfig::anytime(args.alpha, args.delta, args.c, default_t0(args.t0, args.alpha, args.delta)?)
        },
        ModeArg::Fixed => SimConfig::fixed(args.alpha, args.delta, args.c, args.n, args.m),
    };
    let results = monte_carlo_table(&settings, &config, args.reps, args.seed, args.threads).map_err(invalid)?;
    if args.json {
        let report = SimulateReport {
            command: "simulate".to_string(),
            version: VERSION.to_string(),
            type1_reading: TYPE1_READING.to_string(),
            results,
        };
        writeln!(out, "{}", to_json(&report))?;
    } else {
        match config.mode {
            Mode::Anytime => writeln!(
                out,
                "anytime  alpha {}  c {}  t0 {}  delta {}",
                config.alpha, config.c, config.t0, config.delta
            )?,
            Mode::Fixed { n, m } => writeln!(
                out,
                "fixed  alpha {}  c {}  n {n}  m {m}  delta {}",
                config.alpha, config.c, config.delta
            )?,
        }
        for report in &results {
            write!(out, "{}", render(report))?;
        }
    }
    Ok(0)
}
