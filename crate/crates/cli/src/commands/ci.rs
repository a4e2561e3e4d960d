use std::io::Write;
use std::path::Path;

use ci_overlap::intervals::lh_bound;
use ci_overlap::{confidence_interval, EProcessState, ScheduleKind, WeightSchedule};

use super::{invalid, CiArgs, IntervalArgs};
use crate::data::DataFile;
use crate::report::{to_json, CiConfig, CiReport, SeriesInterval, VERSION};

/// Label for the rows of an unlabeled file.
pub(super) fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Interval of `values`; fixed schedules are tuned to the series length.
pub(super) fn series_interval(
    label: &str,
    values: &[f64],
    args: &IntervalArgs,
) -> anyhow::Result<SeriesInterval> {
    let kind = ScheduleKind::from(args.schedule);
    let n = values.len();
    let schedule = WeightSchedule::from_kind(kind, n.max(1), args.alpha, args.c, args.t0, args.bounds)
        .map_err(invalid)?;
    let mut state = EProcessState::new(schedule);
    for &v in values {
        state.observe(v).map_err(invalid)?;
    }
    let ci = confidence_interval(&state, args.alpha).map_err(invalid)?;
    let length_bound = match kind {
        ScheduleKind::FixedHoeffding if n > 0 => lh_bound(n, args.alpha, args.c, args.bounds)
            .map_err(invalid)?
            .bound,
        _ => None,
    };
    Ok(SeriesInterval::new(label, values, &ci, length_bound))
}

pub(super) fn file_intervals(path: &Path, args: &IntervalArgs) -> anyhow::Result<Vec<SeriesInterval>> {
    let file = DataFile::read(path)?;
    file.check_bounds(args.bounds)?;
    let mut series = file.series(&stem(path));
    if series.is_empty() {
        series.push((stem(path), Vec::new()));
    }
    series
        .iter()
        .map(|(label, values)| series_interval(label, values, args))
        .collect()
}

pub(super) fn run(args: &CiArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let a = &args.interval;
    let report = CiReport {
        command: "ci".to_string(),
        version: VERSION.to_string(),
        input: args.input.display().to_string(),
        config: CiConfig {
            alpha: a.alpha,
            bounds: a.bounds,
            schedule: a.schedule.into(),
            c: a.c,
            t0: a.t0,
        },
        intervals: file_intervals(&args.input, a)?,
    };
    if args.json {
        writeln!(out, "{}", to_json(&report))?;
    } else {
        for s in &report.intervals {
            write!(
                out,
                "{}: [{:.6}, {:.6}] mu_hat {:.6} n {}",
                s.label, s.lo, s.hi, s.mu_hat, s.n
            )?;
            if s.clamped_lo || s.clamped_hi {
                write!(out, " (clamped to the support)")?;
            }
            writeln!(out)?;
        }
    }
    Ok(0)
}
