use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use ci_overlap::sim::{builtin, replication_rng, run_replication, SimConfig};
use ci_overlap::{Arm, OverlapEngine, TestConfig};
use ci_overlap_cli::report::{CiReport, CompareReport, MonitorReport, SimulateReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

const BIN: &str = env!("CARGO_BIN_EXE_ci-overlap");

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    // A monitor may exit before reading everything; a broken pipe is fine.
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    let out = child.wait_with_output().unwrap();
    Output {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn column(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Parses a report and checks that writing it again gives the same JSON.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(json: &str) -> T {
    let parsed: T = serde_json::from_str(json).unwrap();
    let again = serde_json::to_string_pretty(&parsed).unwrap();
    assert_eq!(again.trim_end(), json.trim_end());
    assert_eq!(serde_json::from_str::<T>(&again).unwrap(), parsed);
    parsed
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 }).collect()
}

#[test]
fn ci_on_an_empty_file_is_the_support() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "empty.csv", "");
    let out = run(&["ci", "--input", p(&f), "--bounds", "-1,2", "--json"], "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r: CiReport = round_trip(&out.stdout);
    let s = &r.intervals[0];
    assert_eq!((s.lo, s.hi, s.n), (-1.0, 2.0, 0));
    assert!(s.clamped_lo && s.clamped_hi);
}

#[test]
fn ci_length_and_nesting() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = write(dir.path(), "b.csv", &column(&bernoulli(&mut rng, 0.5, 1000)));
    let ci = |alpha: &str| -> CiReport {
        let out = run(&["ci", "--input", p(&f), "--bounds", "0,1", "--alpha", alpha, "--json"], "");
        assert_eq!(out.code, 0, "{}", out.stderr);
        round_trip(&out.stdout)
    };
    let wide = &ci("0.05").intervals[0];
    let narrow = &ci("0.1").intervals[0];
    let bound = ci_overlap::intervals::lh_bound(1000, 0.1, 1.0, ci_overlap::SupportBounds::unit())
        .unwrap()
        .bound
        .unwrap();
    assert_eq!(narrow.length_bound, Some(bound));
    assert!(narrow.hi - narrow.lo <= bound);
    assert!(wide.lo <= narrow.lo && narrow.hi <= wide.hi);
}

#[test]
fn ci_input_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.csv", "value\n0.5\n0.25\n1.5\n");
    let out = run(&["ci", "--input", p(&f), "--bounds", "0,1"], "");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("bad.csv:4"), "{}", out.stderr);
    let f = write(dir.path(), "junk.csv", "0.5\nabc\n");
    let out = run(&["ci", "--input", p(&f), "--bounds", "0,1"], "");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("junk.csv:2"), "{}", out.stderr);
    let out = run(&["ci", "--input", p(&f), "--bounds", "1,0"], "");
    assert_eq!(out.code, 2);
}

#[test]
fn ci_reports_each_label() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "l.csv", "arm,score\nb,0.2\na,0.9\nb,0.4\n");
    let out = run(&["ci", "--input", p(&f), "--bounds", "0,1", "--json"], "");
    let r: CiReport = round_trip(&out.stdout);
    let labels: Vec<(&str, usize)> = r.intervals.iter().map(|s| (s.label.as_str(), s.n)).collect();
    assert_eq!(labels, vec![("b", 2), ("a", 1)]);
}

#[test]
fn compare_fixed_mode_examples() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let same = column(&bernoulli(&mut rng, 0.5, 300));
    let x = write(dir.path(), "x.csv", &same);
    let y = write(dir.path(), "y.csv", &same);
    let args = ["compare", "--mode", "fixed", "--bounds-x", "0,1", "--bounds-y", "0,1", "--json"];
    let out = run(&[&args[..], &["--x", p(&x), "--y", p(&y)]].concat(), "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r: CompareReport = round_trip(&out.stdout);
    assert_eq!(r.outcome.decision.to_string(), "H0");

    let zeros = write(dir.path(), "zeros.csv", &column(&[0.0; 200]));
    let ones = write(dir.path(), "ones.csv", &column(&[1.0; 200]));
    let out = run(&[&args[..], &["--x", p(&zeros), "--y", p(&ones)]].concat(), "");
    let r: CompareReport = round_trip(&out.stdout);
    assert_eq!(r.outcome.decision.to_string(), "H1-");
    let (cx, cy) = (r.outcome.ci_x.unwrap(), r.outcome.ci_y.unwrap());
    assert!(cx.hi < cy.lo);
    assert_eq!(r.bounds.bounds.type2, None);
}

#[test]
fn compare_with_too_few_rows_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.csv", &column(&[0.0; 50]));
    let y = write(dir.path(), "y.csv", &column(&[1.0; 50]));
    let out = run(
        &["compare", "--x", p(&x), "--y", p(&y), "--t0", "60", "--bounds-x", "0,1", "--bounds-y", "0,1"],
        "",
    );
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out.stdout.contains("continue"));
}

/// Files drawn by the simulator's own random stream give the same run as
/// the simulator.
#[test]
fn compare_matches_the_simulator_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ber-lower", "beta-lower"] {
        let setting = builtin(name).unwrap();
        let mut rng = replication_rng(42, 0);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for _ in 0..6000 {
            xs.push(setting.dist_p.sample(&mut rng));
            ys.push(setting.dist_q.sample(&mut rng));
        }
        let x = write(dir.path(), "x.csv", &column(&xs));
        let y = write(dir.path(), "y.csv", &column(&ys));
        let out = run(
            &["compare", "--x", p(&x), "--y", p(&y), "--t0", "338", "--bounds-x", "0,1", "--bounds-y", "0,1", "--json"],
            "",
        );
        assert_eq!(out.code, 0, "{name}: {}", out.stderr);
        let r: CompareReport = round_trip(&out.stdout);

        let sim = run_replication(&setting, &SimConfig::anytime(0.1, 0.1, 1.0, 338), 42, 0).unwrap();
        assert_eq!((r.outcome.decision, r.outcome.n, r.outcome.m), (sim.decision, sim.n, sim.m), "{name}");

        let config = TestConfig::anytime(0.1, 0.1, 338, 1.0, setting.bounds_p, setting.bounds_q).unwrap();
        let mut engine = OverlapEngine::new(config).unwrap();
        let mut decision = None;
        for (&a, &b) in xs.iter().zip(&ys) {
            for (arm, v) in [(Arm::P, a), (Arm::Q, b)] {
                let d = engine.step(arm, v).unwrap();
                if d.kind.is_terminal() && decision.is_none() {
                    decision = Some(d);
                }
            }
            if decision.is_some() {
                break;
            }
        }
        let d = decision.unwrap();
        assert_eq!(d.ci_x.unwrap().lo.to_bits(), r.outcome.ci_x.unwrap().lo.to_bits());
        assert_eq!(d.ci_y.unwrap().hi.to_bits(), r.outcome.ci_y.unwrap().hi.to_bits());
    }
}

fn monitor_config(dir: &Path, t0: usize) -> PathBuf {
    write(
        dir,
        "monitor.json",
        &format!(r#"{{"alpha":0.1,"delta":0.1,"t0":{t0},"c":1,"bounds_p":[0,1],"bounds_q":[0,1]}}"#),
    )
}

#[test]
fn monitor_empty_input_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = monitor_config(dir.path(), 5);
    let out = run(&["monitor", "--config", p(&cfg)], "");
    assert_eq!(out.code, 3);
    let report: MonitorReport = serde_json::from_str(out.stdout.lines().last().unwrap()).unwrap();
    assert_eq!(report.outcome.decision.to_string(), "continue");
}

#[test]
fn monitor_reaches_h0_on_tight_equal_streams() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = monitor_config(dir.path(), 5);
    let stream: String = (0..4000).map(|i| if i % 2 == 0 { "P,0.5\n" } else { "Q,0.5\n" }).collect();
    let mut engine = OverlapEngine::new(
        TestConfig::anytime(0.1, 0.1, 5, 1.0, ci_overlap::SupportBounds::unit(), ci_overlap::SupportBounds::unit())
            .unwrap(),
    )
    .unwrap();
    let mut used = 0;
    for i in 0..4000 {
        used += 1;
        let arm = if i % 2 == 0 { Arm::P } else { Arm::Q };
        if engine.step(arm, 0.5).unwrap().kind.is_terminal() {
            break;
        }
    }
    let head: String = stream.lines().take(used).map(|l| format!("{l}\n")).collect();
    let out = run(&["monitor", "--config", p(&cfg)], &head);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: MonitorReport = serde_json::from_str(out.stdout.lines().last().unwrap()).unwrap();
    assert_eq!(report.outcome.decision.to_string(), "H0");
    assert_eq!(report.outcome.stopped_at, Some(used));
    assert_eq!(out.stdout.lines().count(), used + 1);

    let out = run(&["monitor", "--config", p(&cfg)], &stream);
    assert_eq!(out.code, 4);
    assert!(out.stderr.contains(&format!("stdin:{}", used + 1)), "{}", out.stderr);
}

#[test]
fn monitor_transcript_replays_through_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = monitor_config(dir.path(), 20);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut lines = String::new();
    let (mut x, mut y) = (String::new(), String::new());
    for i in 0..3000 {
        if rng.random_bool(0.5) {
            let v = rng.random::<f64>() * 0.8;
            lines.push_str(&format!("P,{v}\n"));
            x.push_str(&format!("P,{v},{i}\n"));
        } else {
            let v = 0.2 + rng.random::<f64>() * 0.8;
            lines.push_str(&format!("Q,{v}\n"));
            y.push_str(&format!("Q,{v},{i}\n"));
        }
    }
    let out = run(&["monitor", "--config", p(&cfg)], &lines);
    let last = out.stdout.lines().last().unwrap();
    let monitored: MonitorReport = serde_json::from_str(last).unwrap();
    let xf = write(dir.path(), "x.csv", &x);
    let yf = write(dir.path(), "y.csv", &y);
    let cmp = run(
        &["compare", "--x", p(&xf), "--y", p(&yf), "--t0", "20", "--bounds-x", "0,1", "--bounds-y", "0,1", "--json"],
        "",
    );
    let compared: CompareReport = round_trip(&cmp.stdout);
    assert_eq!(compared.outcome, monitored.outcome);
    assert_eq!(compared.config, monitored.config);
}

#[test]
fn simulate_is_deterministic_and_rejects_unknown_settings() {
    let args = ["simulate", "--setting", "ber-lower", "--reps", "1", "--seed", "7", "--t0", "338", "--json"];
    let a = run(&args, "");
    let b = run(&args, "");
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let r: SimulateReport = round_trip(&a.stdout);
    assert_eq!(r.results[0].reps, 1);

    let out = run(&["simulate", "--setting", "coin"], "");
    assert_eq!(out.code, 2);
    for name in ci_overlap::sim::BUILTIN_NAMES {
        assert!(out.stderr.contains(name));
    }
}

#[test]
fn bounds_with_forced_c() {
    let out = run(&["bounds", "--t0", "338", "--force-c-t0", "1", "--json"], "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r: ci_overlap_cli::report::BoundsReport = round_trip(&out.stdout);
    approx::assert_abs_diff_eq!(r.bounds.bounds.type1_per_side.unwrap(), 0.1f64.powf(1.5), epsilon = 1e-15);
    let out = run(&["bounds", "--force-c-t0", "0.5"], "");
    assert_eq!(out.code, 2);
}

fn three_series() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut text = String::from("series,value\n");
    for _ in 0..200 {
        text.push_str(&format!("coin,{}\n", if rng.random::<f64>() < 0.5 { 1 } else { 0 }));
    }
    for _ in 0..400 {
        text.push_str(&format!("uniform,{}\n", rng.random::<f64>() * 0.6));
    }
    for _ in 0..100 {
        text.push_str(&format!("skewed,{}\n", rng.random::<f64>().powi(3)));
    }
    text
}

#[test]
fn svg_matches_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "three.csv", &three_series());
    let svg = dir.path().join("out.svg");
    let out = run(
        &["plot", "--inputs", p(&f), "--bounds", "0,1", "--alpha", "0.1", "--format", "svg", "--out", p(&svg)],
        "",
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    let got = std::fs::read_to_string(&svg).unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/three_series.svg");
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&golden, &got).unwrap();
    }
    let want = std::fs::read_to_string(&golden).unwrap();
    assert_eq!(got, want);
}

#[test]
fn ascii_single_series_spans_the_axis() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "empty.csv", "");
    let out = run(&["plot", "--inputs", p(&f), "--bounds", "0,1", "--format", "ascii"], "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let first = out.stdout.lines().next().unwrap();
    let area: String = first.chars().skip_while(|&c| c != '|').skip(1).take(80).collect();
    assert!(area.starts_with('[') && area.ends_with(']'), "{first}");
    assert!(out.stdout.lines().last().unwrap().contains("0.0000"));
}
