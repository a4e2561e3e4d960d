use std::io::Write;

use ci_overlap::error_bounds::error_bounds_with;
use ci_overlap::TestConfig;

use super::{default_t0, invalid, BoundsArgs, ModeArg};
use crate::report::{render_bounds, to_json, BoundsReport, VERSION};

pub(super) fn run(args: &BoundsArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let config = match args.mode {
        ModeArg::Anytime => TestConfig::anytime(
            args.alpha,
            args.delta,
            default_t0(args.t0, args.alpha, args.delta)?,
            args.c,
            args.bounds_p,
            args.bounds_q,
        ),
        ModeArg::Fixed => TestConfig::fixed(
            args.alpha,
            args.delta,
            args.n,
            args.m,
            args.c,
            args.bounds_p,
            args.bounds_q,
        ),
    }
    .map_err(invalid)?;
    let bounds = error_bounds_with(&config, args.force_c_t0).map_err(invalid)?;
    let report = BoundsReport {
        command: "bounds".to_string(),
        version: VERSION.to_string(),
        config,
        c_t0_override: args.force_c_t0,
        bounds: bounds.into(),
    };
    if args.json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        write!(out, "{}", render_bounds(&bounds))?;
        if let Some(c) = args.force_c_t0 {
            writeln!(out, "(type I uses C_t0 = {c} from --force-c-t0)")?;
        }
    }
    Ok(0)
}
