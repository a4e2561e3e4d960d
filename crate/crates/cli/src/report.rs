//! Machine-readable reports. Field order is the declaration order, and
//! numbers are written with enough digits to parse back bit-exactly.

use ci_overlap::error_bounds::ErrorBounds;
use ci_overlap::sim::McReport;
use ci_overlap::{ConfidenceInterval, Decision, DecisionKind, ScheduleKind, SupportBounds, TestConfig};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const TYPE1_READING: &str = "type1_per_side bounds the probability of deciding H1+ (or, separately, H1-) when the means are equal; type1_two_sided is their sum, the probability of either wrong-direction rejection";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesInterval {
    pub label: String,
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub mu_hat: f64,
    /// Sample mean; absent for an empty series.
    pub mean: Option<f64>,
    pub clamped_lo: bool,
    pub clamped_hi: bool,
    /// Worst-case length for fixed Hoeffding weights.
    pub length_bound: Option<f64>,
}

impl SeriesInterval {
    pub fn new(label: &str, values: &[f64], ci: &ConfidenceInterval, length_bound: Option<f64>) -> Self {
        SeriesInterval {
            label: label.to_string(),
            n: ci.n,
            lo: ci.lo,
            hi: ci.hi,
            mu_hat: ci.mu_hat,
            mean: (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64),
            clamped_lo: ci.clamped_lo,
            clamped_hi: ci.clamped_hi,
            length_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiConfig {
    pub alpha: f64,
    pub bounds: SupportBounds,
    pub schedule: ScheduleKind,
    pub c: f64,
    pub t0: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiReport {
    pub command: String,
    pub version: String,
    pub input: String,
    pub config: CiConfig,
    pub intervals: Vec<SeriesInterval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Decided,
    Inconclusive,
}

/// How observations from the two files were interleaved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Interleave {
    RoundRobin,
    OrderColumn,
    Seeded { seed: u64 },
    /// Fixed mode looks at both samples once.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub decision: DecisionKind,
    pub relation: String,
    /// Observations of `X` and `Y` behind the decision.
    pub n: usize,
    pub m: usize,
    /// Position in the merged stream where the decision was taken.
    pub stopped_at: Option<usize>,
    pub ci_x: Option<ConfidenceInterval>,
    pub ci_y: Option<ConfidenceInterval>,
}

impl Outcome {
    pub fn from_decision(d: &Decision, stopped_at: Option<usize>) -> Self {
        Outcome {
            status: if d.kind.is_terminal() {
                Status::Decided
            } else {
                Status::Inconclusive
            },
            decision: d.kind,
            relation: d.kind.relation().to_string(),
            n: d.n,
            m: d.m,
            stopped_at,
            ci_x: d.ci_x,
            ci_y: d.ci_y,
        }
    }
}

/// Error bounds with the note on how to read the type I values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSection {
    #[serde(flatten)]
    pub bounds: ErrorBounds,
    pub type1_reading: String,
}

impl From<ErrorBounds> for BoundsSection {
    fn from(bounds: ErrorBounds) -> Self {
        BoundsSection {
            bounds,
            type1_reading: TYPE1_READING.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub command: String,
    pub version: String,
    pub x: String,
    pub y: String,
    pub interleave: Interleave,
    pub config: TestConfig,
    pub outcome: Outcome,
    pub bounds: BoundsSection,
}

/// Status record emitted after each monitored line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorStatus {
    pub line: usize,
    pub arm: ci_overlap::Arm,
    pub value: f64,
    pub n: usize,
    pub m: usize,
    pub decision: DecisionKind,
    pub ci_x: Option<ConfidenceInterval>,
    pub ci_y: Option<ConfidenceInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub command: String,
    pub version: String,
    pub config: TestConfig,
    pub outcome: Outcome,
    pub bounds: BoundsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub command: String,
    pub version: String,
    pub type1_reading: String,
    pub results: Vec<McReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub command: String,
    pub version: String,
    pub config: TestConfig,
    /// Value substituted for `C_t0` in the type I bound, if any.
    pub c_t0_override: Option<f64>,
    pub bounds: BoundsSection,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// Renders an optional bound; `missing` describes what `None` means.
pub fn show(value: Option<f64>, missing: &str) -> String {
    match value {
        Some(v) => format!("{v:.6}"),
        None => missing.to_string(),
    }
}

pub fn show_interval(ci: &Option<ConfidenceInterval>) -> String {
    match ci {
        Some(ci) => format!("[{:.6}, {:.6}] mu_hat {:.6} n {}", ci.lo, ci.hi, ci.mu_hat, ci.n),
        None => "not evaluated".to_string(),
    }
}

pub fn render_bounds(bounds: &ErrorBounds) -> String {
    let none = "not applicable";
    let mut out = String::new();
    out.push_str(&format!("C_t0                 {}\n", show(bounds.c_t0, none)));
    out.push_str(&format!("type I per side      {}\n", show(bounds.type1_per_side, none)));
    out.push_str(&format!("type I two-sided     {}\n", show(bounds.type1_two_sided, none)));
    out.push_str(&format!("type II              {}\n", show(bounds.type2, "no guarantee (<= 1)")));
    out.push_str(&format!("type III per dir.    {}\n", show(bounds.type3_per_direction, none)));
    if bounds.l_h_p.is_some() || bounds.l_h_q.is_some() {
        out.push_str(&format!("L_H (P)              {}\n", show(bounds.l_h_p, "infeasible")));
        out.push_str(&format!("L_H (Q)              {}\n", show(bounds.l_h_q, "infeasible")));
    }
    out
}
