use std::io::{BufRead, Write};
use std::path::PathBuf;

use ci_overlap::{ScheduleKind, SupportBounds};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::parse_bounds;

mod bounds;
mod ci;
mod compare;
mod monitor;
mod plot;
mod simulate;

pub use monitor::MonitorConfig;

#[derive(Debug, Parser)]
#[command(name = "ci-overlap", version, about = "Confidence-interval overlap tests for bounded data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Confidence interval for the mean of each series in a CSV file.
    Ci(CiArgs),
    /// Compare the means of two CSV files.
    Compare(CompareArgs),
    /// Sequential test on `P,<value>` / `Q,<value>` lines from stdin.
    Monitor(MonitorArgs),
    /// Monte Carlo error frequencies on a built-in setting.
    Simulate(SimulateArgs),
    /// Theoretical error bounds for a configuration.
    Bounds(BoundsArgs),
    /// Chart of the intervals of one or more series.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fixed,
    Anytime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    FixedHoeffding,
    FixedBernstein,
    Anytime,
}

impl From<ScheduleArg> for ScheduleKind {
    fn from(arg: ScheduleArg) -> Self {
        match arg {
            ScheduleArg::FixedHoeffding => ScheduleKind::FixedHoeffding,
            ScheduleArg::FixedBernstein => ScheduleKind::FixedBernstein,
            ScheduleArg::Anytime => ScheduleKind::Anytime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Svg,
    Ascii,
}

/// Weight options shared by `ci` and `plot`.
#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Support of the data as `a,b`.
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: SupportBounds,
    #[arg(long, value_enum, default_value_t = ScheduleArg::FixedHoeffding)]
    pub schedule: ScheduleArg,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Burn-in of the anytime schedule.
    #[arg(long, default_value_t = 1)]
    pub t0: usize,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub interval: IntervalArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Anytime)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Burn-in per arm; defaults to the heuristic for `alpha` and `delta`.
    #[arg(long)]
    pub t0: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds_x: SupportBounds,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds_y: SupportBounds,
    /// Interleave the two files in a random order drawn from this seed.
    #[arg(long)]
    pub seed_order: Option<u64>,
    /// Weight family for fixed mode.
    #[arg(long, value_enum, default_value_t = ScheduleArg::FixedHoeffding)]
    pub schedule: ScheduleArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// JSON file with alpha, delta, c, bounds_p, bounds_q and optional t0, stride.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in setting name, or `all`.
    #[arg(long)]
    pub setting: String,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Anytime)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Burn-in per arm; defaults to the heuristic for `alpha` and `delta`.
    #[arg(long)]
    pub t0: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Sample sizes for fixed mode.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Observations between two anytime evaluations.
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    /// Total draws after which an anytime run counts as undecided.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_samples: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long)]
    pub t0: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true, default_value = "0,1")]
    pub bounds_p: SupportBounds,
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true, default_value = "0,1")]
    pub bounds_q: SupportBounds,
    #[arg(long, value_enum, default_value_t = ModeArg::Anytime)]
    pub mode: ModeArg,
    /// Use this value of C_t0 in the type I bound instead of the computed one.
    #[arg(long)]
    pub force_c_t0: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV files; labeled files contribute one row per label.
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub interval: IntervalArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Svg)]
    pub format: FormatArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one parsed command line.
pub fn run(cli: Cli, stdin: &mut dyn BufRead, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::Ci(args) => ci::run(&args, out),
        Command::Compare(args) => compare::run(&args, out),
        Command::Monitor(args) => monitor::run(&args, stdin, out),
        Command::Simulate(args) => simulate::run(&args, out),
        Command::Bounds(args) => bounds::run(&args, out),
        Command::Plot(args) => plot::run(&args, out),
    }
}

/// Default burn-in when `--t0` is absent.
fn default_t0(t0: Option<usize>, alpha: f64, delta: f64) -> anyhow::Result<usize> {
    match t0 {
        Some(t0) => Ok(t0),
        None => ci_overlap::error_bounds::t0_heuristic(alpha, delta).map_err(|e| crate::failure::input(e.to_string())),
    }
}

/// Parameter errors from the library are input errors.
fn invalid(err: ci_overlap::Error) -> anyhow::Error {
    crate::failure::input(err.to_string())
}
