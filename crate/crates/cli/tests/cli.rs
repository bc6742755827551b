//! End-to-end checks of the binary: exit codes, output shapes and
//! byte-for-byte reproducibility of body plus manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcri"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

const TINY_SCENARIO: &str = "\
spec_x = exponential:1
spec_y = exponential:1
n = 10,20
replicates = 100
seed = 1
scenario = tiny
";

#[test]
fn analytic_unit_exponentials_print_half() {
    let out = run(&["analytic", "--spec", "exponential:1"]);
    assert!(out.status.success());
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("spec,theta,alpha,beta,t,route,value"));
    assert_eq!(lines.next(), Some("exponential:1,1,1,1,0,closed_form,0.5"));
}

#[test]
fn analytic_without_closed_form_reports_quadrature_route() {
    let out = run(&["analytic", "--spec", "lognormal:0,1"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert!(body.contains(",quadrature,"), "body: {body}");
}

#[test]
fn usage_error_exits_one() {
    let out = run(&["analytic", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn missing_input_exits_two() {
    let out = run(&["simulate", "/nonexistent/path.scenario"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn divergent_integral_exits_three() {
    // Pareto with shape 0.5 has no finite value at alpha = beta = 1.
    let out = run(&["analytic", "--spec", "pareto_i:1,0.5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_tolerance_env_exits_two() {
    let out = bin()
        .args(["analytic", "--spec", "exponential:1"])
        .env("RCRI_ABS_TOL", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_emits_one_row_per_cell_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.scenario");
    fs::write(&path, TINY_SCENARIO).unwrap();

    let out = run(&["simulate", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = stdout(&out);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "scenario,n,bias,mse,truth");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("tiny,10,"));
    assert!(lines[2].starts_with("tiny,20,"));

    let manifest: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(manifest["subcommand"], "simulate");
    assert_eq!(manifest["seeds"][0], 1);
    assert_eq!(manifest["outputs"][0], "stdout");
}

#[test]
fn rerun_reproduces_body_and_manifest_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("tiny.scenario");
    fs::write(&scenario, TINY_SCENARIO).unwrap();
    let body_path = dir.path().join("table.csv");
    let args = [
        "simulate",
        scenario.to_str().unwrap(),
        "--out",
        body_path.to_str().unwrap(),
    ];

    assert!(run(&args).status.success());
    let manifest_path = body_path.with_extension("manifest.json");
    let body_first = fs::read(&body_path).unwrap();
    let manifest_first = fs::read(&manifest_path).unwrap();

    assert!(run(&args).status.success());
    assert_eq!(body_first, fs::read(&body_path).unwrap());
    assert_eq!(manifest_first, fs::read(&manifest_path).unwrap());

    let manifest: serde_json::Value = serde_json::from_slice(&manifest_first).unwrap();
    assert_eq!(manifest["outputs"][0], body_path.to_str().unwrap());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("tiny.scenario");
    fs::write(&scenario, TINY_SCENARIO).unwrap();
    let path = scenario.to_str().unwrap();

    let serial = run(&["simulate", path, "--threads", "1"]);
    let parallel = run(&["simulate", path, "--threads", "4"]);
    assert!(serial.status.success() && parallel.status.success());
    assert_eq!(stdout(&serial), stdout(&parallel));
}

#[test]
fn estimate_reads_sample_files() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.txt");
    let y = dir.path().join("y.txt");
    fs::write(&x, "0.5\n1.2\n0.8\n2.0\n1.5\n0.3\n").unwrap();
    fs::write(&y, "0.9\n1.1\n0.4\n1.8\n0.7\n2.2\n").unwrap();

    let out = run(&[
        "estimate",
        x.to_str().unwrap(),
        y.to_str().unwrap(),
        "--shared-bandwidth",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = stdout(&out);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(
        lines[0],
        "n_x,n_y,kernel,shared_bandwidth,bandwidth_x,bandwidth_y,alpha,beta,t,estimate"
    );
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells[3], "true");
    assert_eq!(cells[4], cells[5]);
    let estimate: f64 = cells[9].parse().unwrap();
    assert!(estimate.is_finite() && estimate > 0.0);
}

#[test]
fn characterize_reports_verdict_and_grid() {
    let out = run(&[
        "characterize",
        "--spec",
        "exponential:1",
        "--theta",
        "0.5",
        "--grid",
        "0:2:0.5",
        "--property",
        "constant",
    ]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert!(body.starts_with("property,holds,fit_residual,level\nconstant,true,"));
    assert!(body.contains("\nt,value\n"));
    assert_eq!(body.lines().filter(|l| l.starts_with("2,")).count(), 1);
}

#[test]
fn characterize_rejects_unknown_property() {
    let out = run(&[
        "characterize",
        "--spec",
        "exponential:1",
        "--grid",
        "0:1:0.5",
        "--property",
        "sideways",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn photometry_parametric_table_covers_requested_pairs() {
    let fixture = repo_path("fixtures/synthetic_epoch.csv");
    let out = run(&["photometry", "--input", fixture.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = stdout(&out);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "pair,rcri,bias,mse");
    assert_eq!(lines.len(), 4);
    for (line, pair) in lines[1..].iter().zip(["G:BP", "G:RP", "BP:RP"]) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], pair);
        let rcri: f64 = cells[1].parse().unwrap();
        assert!(rcri > 0.0);
        assert_eq!(cells[2], "");
        assert_eq!(cells[3], "");
    }
}

#[test]
fn json_format_mirrors_the_csv_tables() {
    let out = run(&["analytic", "--spec", "exponential:1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["tables"][0]["name"], "analytic");
    assert_eq!(doc["tables"][0]["rows"][0]["value"], "0.5");
}

#[test]
fn selftest_exits_zero() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let body = stdout(&out);
    assert!(body.starts_with("check,ok,detail"));
    assert!(!body.contains(",false,"), "body: {body}");
}
