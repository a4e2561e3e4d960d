use std::io::Write;

use super::ci::file_intervals;
use super::{FormatArg, PlotArgs};
use crate::chart;
use crate::failure::input;

pub(super) fn run(args: &PlotArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let mut rows = Vec::new();
    for path in &args.inputs {
        rows.extend(file_intervals(path, &args.interval)?);
    }
    let document = match args.format {
        FormatArg::Svg => chart::svg(&rows),
        FormatArg::Ascii => chart::ascii(&rows),
    };
    match &args.out {
        Some(path) => std::fs::write(path, document)
            .map_err(|e| input(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(document.as_bytes())?,
    }
    Ok(0)
}
