use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use selectorate_core::{model, Allocation, Benchmark, FunctionFamily, PolityParams};
use serde_json::Value;

const EXAMPLE: &str = "N = 10000\nS = 10000\nW = 300\nR = 1000\nr = 0.5\np = 200\ndelta = 0.55\n";

fn selectorate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selectorate")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn solve_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ex.cfg", EXAMPLE);
    let a = selectorate(&["solve", "--config", &cfg]);
    let b = selectorate(&["solve", "--config", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sw.cfg",
        &format!("{EXAMPLE}sweep.parameter = W\nsweep.from = 300\nsweep.to = 3000\nsweep.steps = 4\n"),
    );
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.csv"));
        let svg = dir.path().join(format!("fig{k}.svg"));
        let o = selectorate(&[
            "sweep",
            "--config",
            &cfg,
            "--format",
            "csv",
            "--out",
            out.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push((
            fs::read(&out).unwrap(),
            fs::read(dir.path().join(format!("fig{k}_public.svg"))).unwrap(),
            fs::read(dir.path().join(format!("fig{k}_private.svg"))).unwrap(),
        ));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn missing_price_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", &EXAMPLE.replace("p = 200\n", ""));
    let o = selectorate(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("public_price"));
}

#[test]
fn unreadable_config_and_bad_flags_exit_2() {
    assert_eq!(selectorate(&["solve", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ex.cfg", EXAMPLE);
    assert_eq!(selectorate(&["solve", "--config", &cfg, "--format", "xml"]).status.code(), Some(2));
    assert_eq!(selectorate(&["solve", "--config", &cfg, "--precision", "1"]).status.code(), Some(2));
    assert_eq!(selectorate(&["solve", "--config", &cfg, "--regime", "general"]).status.code(), Some(2));
    assert_eq!(
        selectorate(&["solve", "--config", &cfg, "--regime", "general", "--rho", "0.01"]).status.code(),
        Some(2)
    );
}

#[test]
fn infeasible_polity_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = EXAMPLE.replace("R = 1000", "R = 0").replace("r = 0.5", "r = 0");
    let cfg = write_config(dir.path(), "inf.cfg", &text);
    for cmd in ["solve", "oracle", "report"] {
        let o = selectorate(&[cmd, "--config", &cfg]);
        assert_eq!(o.status.code(), Some(3), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"), "{cmd}");
    }
}

#[test]
fn equal_solve_leaves_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ex.cfg", EXAMPLE);
    let o = selectorate(&["solve", "--config", &cfg, "--regime", "equal", "--precision", "10"]);
    let v = json(&o);
    assert!(num(&v["discretionary"]).abs() < 1e-6);
    assert!((num(&v["g_star"]) - 498.9039).abs() < 1e-3);
}

#[test]
fn sweep_with_two_steps_has_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sw.cfg",
        &format!("{EXAMPLE}sweep.parameter = W\nsweep.from = 300\nsweep.to = 600\nsweep.steps = 2\n"),
    );
    let o = selectorate(&["sweep", "--config", &cfg, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param_value,regime,g_star,z_star,discretionary,foc_residual,constraint_residual,converged"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn sweep_to_full_coalition_ends_with_matching_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sw.cfg",
        &format!("{EXAMPLE}sweep.parameter = W\nsweep.from = 5000\nsweep.to = 10000\nsweep.steps = 3\n"),
    );
    let o = selectorate(&["sweep", "--config", &cfg, "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let (a, e) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    assert_eq!((a[1], e[1]), ("asymmetric", "equal"));
    assert_eq!(a[0], "10000.000000");
    assert_eq!(a[2..5], e[2..5], "g*, z*, D differ at W = S");
}

#[test]
fn partial_sweep_failure_exits_4_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let text = EXAMPLE.replace("r = 0.5", "r = 0");
    let cfg = write_config(
        dir.path(),
        "sw.cfg",
        &format!("{text}sweep.parameter = R\nsweep.from = 0\nsweep.to = 1000\nsweep.steps = 3\n"),
    );
    let out = dir.path().join("rows.csv");
    let o = selectorate(&["sweep", "--config", &cfg, "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2 of 6"));
    let csv = fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.contains("0.000000,asymmetric,,,,,,false"));
}

#[test]
fn svg_is_self_contained_and_labelled() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sw.cfg",
        &format!("{EXAMPLE}sweep.parameter = W\nsweep.from = 300\nsweep.to = 9000\nsweep.steps = 6\n"),
    );
    let svg = dir.path().join("fig.svg");
    let o = selectorate(&[
        "sweep",
        "--config",
        &cfg,
        "--svg",
        svg.to_str().unwrap(),
        "--out",
        dir.path().join("s.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for (file, quantity) in [("fig_public.svg", "public goods"), ("fig_private.svg", "private goods")] {
        let text = fs::read_to_string(dir.path().join(file)).unwrap();
        assert!(text.contains(r#"viewBox="0 0 800 600""#));
        assert!(!text.contains("href") && !text.contains("url("));
        assert!(text.contains("coalition (W)") && text.contains(quantity));
        assert_eq!(text.matches("<polyline").count(), 2);
        // Sampled at the rows only.
        let first = text.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(first.split(' ').count(), 6);
    }
}

/// Re-evaluates residuals from the printed numbers.
fn reevaluate(v: &Value, params: &PolityParams, fns: &FunctionFamily) -> (f64, f64) {
    let alloc = Allocation::new(num(&v["g_star"]), num(&v["z_star"]));
    let bench = Benchmark::new(fns, num(&v["benchmark"]["g_hat"]), num(&v["benchmark"]["z_hat"]));
    match v["regime"].as_str().unwrap() {
        "equal" => (
            model::efoc_residual(params, fns, &alloc).unwrap(),
            model::discretionary(params, fns, &alloc).unwrap() / params.coalition,
        ),
        "asymmetric" => (
            model::afoc_residual(params, fns, &alloc).unwrap(),
            model::select_residual(params, fns, &alloc, &bench).unwrap(),
        ),
        _ => {
            let rho = num(&v["rho"]);
            (
                model::afoc_residual_at(params, fns, &alloc, rho).unwrap(),
                model::select_residual_at(params, fns, &alloc, &bench, rho).unwrap(),
            )
        }
    }
}

#[test]
fn printed_numbers_round_trip_through_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ex.cfg", EXAMPLE);
    let params = PolityParams::published_example();
    let fns = FunctionFamily::square_root();
    for precision in [4usize, 6, 9, 12] {
        for regime in
            [&["--regime", "asymmetric"][..], &["--regime", "equal"], &["--regime", "general", "--rho", "0.5"]]
        {
            let p = precision.to_string();
            let mut args = vec!["solve", "--config", &cfg, "--precision", &p];
            args.extend_from_slice(regime);
            let o = selectorate(&args);
            assert_eq!(o.status.code(), Some(0));
            let (foc, constraint) = reevaluate(&json(&o), &params, &fns);
            let bound = 10f64.powi(-(precision as i32) + 2);
            assert!(foc.abs() < bound && constraint.abs() < bound, "{regime:?} at {precision}: {foc:e} {constraint:e}");
        }
    }
}

#[test]
fn json_and_key_value_configs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let kv = write_config(dir.path(), "ex.cfg", EXAMPLE);
    let js = write_config(
        dir.path(),
        "ex.json",
        r#"{"N": 10000, "S": 10000, "W": 300, "R": 1000, "r": 0.5, "p": 200, "delta": 0.55}"#,
    );
    let a = selectorate(&["solve", "--config", &kv]);
    let b = selectorate(&["solve", "--config", &js]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_agrees_on_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ex.cfg", EXAMPLE);
    for regime in ["equal", "asymmetric"] {
        let o = selectorate(&["oracle", "--config", &cfg, "--regime", regime]);
        assert_eq!(o.status.code(), Some(0), "{regime}");
        let v = json(&o);
        assert!(num(&v["max_relative_deviation"]) <= 1e-3);
        assert_eq!(v["agrees"], Value::Bool(true));
    }
}

#[test]
fn coarse_oracle_still_reports_its_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "coarse.cfg", &format!("{EXAMPLE}oracle.resolution = 50\n"));
    let o = selectorate(&["oracle", "--config", &cfg, "--regime", "equal", "--precision", "12"]);
    let v = json(&o);
    let dev = num(&v["max_relative_deviation"]);
    assert_eq!(v["resolution"], Value::from(50));
    assert_eq!(o.status.code(), Some(if dev <= 1e-3 { 0 } else { 1 }));
}

#[test]
fn report_omits_reference_away_from_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "w600.cfg", &EXAMPLE.replace("W = 300", "W = 600"));
    let o = selectorate(&["report", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for section in v["regimes"].as_array().unwrap() {
        assert!(section.get("reference").is_none());
        assert!(section.get("solver").is_some() && section.get("oracle").is_some());
    }
}

#[test]
fn csv_format_for_single_documents() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ex.cfg", EXAMPLE);
    let o = selectorate(&["solve", "--config", &cfg, "--format", "csv", "--precision", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.contains("g_star,269.54\n"));
    assert!(text.contains("diagnostics.converged,true\n"));
}

#[test]
fn shipped_configs_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for (file, cmd) in
        [("worked_example.cfg", "solve"), ("coalition_sweep.cfg", "sweep"), ("retention_sweep.json", "sweep")]
    {
        let path = root.join(file);
        let out = dir.path().join(format!("{file}.out"));
        let o = selectorate(&[cmd, "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(fs::metadata(&out).unwrap().len() > 0);
    }
}
