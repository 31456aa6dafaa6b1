//! End-to-end checks of the binary: outputs must agree with direct library
//! calls, and every `--json` payload must round-trip byte for byte through
//! its typed schema.

use folkman::coloring::GroundColoring;
use folkman::extract::Certificate;
use folkman::numbers::{compute_number, is_witness_free, SearchProblem};
use folkman::report::{BoundReport, ExtremalReport, NumberReport, RefuteReport, VerifyReport};
use std::path::PathBuf;
use std::process::Output;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_folkman")
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("folkman-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_true_and_false() {
    let dir = scratch("verify");
    let coloring = dir.join("coloring.txt");
    let witness = dir.join("witness.txt");
    std::fs::write(&coloring, "1 2\n1 1\n").unwrap();
    std::fs::write(&witness, "1 2\n1 1\n").unwrap();

    let out = run(&["verify", coloring.to_str().unwrap(), witness.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "true\n");

    let out = run(&[
        "verify",
        coloring.to_str().unwrap(),
        witness.to_str().unwrap(),
        "--json",
    ]);
    let line = stdout(&out);
    let report: VerifyReport = serde_json::from_str(&line).unwrap();
    assert!(report.verified);
    assert_eq!(serde_json::to_string(&report).unwrap(), line.trim_end());

    std::fs::write(&witness, "1 2\n1 2\n").unwrap();
    let out = run(&["verify", coloring.to_str().unwrap(), witness.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn verify_reads_json_inputs() {
    let dir = scratch("verify-json");
    let coloring = dir.join("coloring.json");
    let witness = dir.join("witness.json");
    std::fs::write(&coloring, r#"{"t":2,"n_max":5,"assign":[1,1,1,2,2]}"#).unwrap();
    std::fs::write(&witness, r#"{"ell":1,"a":[1,2]}"#).unwrap();
    let out = run(&["verify", coloring.to_str().unwrap(), witness.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn missing_file_is_io_error() {
    let out = run(&["verify", "/nonexistent/c.txt", "/nonexistent/w.txt"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn free_matches_library() {
    let dir = scratch("free");
    let coloring = dir.join("coloring.txt");
    std::fs::write(&coloring, "2 4\n1 2 2 1\n").unwrap();
    let out = run(&["free", coloring.to_str().unwrap(), "--n", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "true\n");
    let gc = GroundColoring::from_text("2 4\n1 2 2 1\n").unwrap();
    assert!(is_witness_free(&gc, 2, false));
}

#[test]
fn number_matches_library() {
    let out = run(&["number", "--t", "2", "--n", "2", "--cap", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("J(2,2) = 5\n"), "got: {text}");

    let out = run(&["number", "--t", "2", "--n", "2", "--cap", "10", "--json"]);
    let line = stdout(&out);
    let report: NumberReport = serde_json::from_str(&line).unwrap();
    let direct = compute_number(&SearchProblem {
        t: 2,
        n: 2,
        distinct: false,
        cap: 10,
        budget: 100_000_000,
    })
    .unwrap();
    assert_eq!(report.value, direct.value);
    assert_eq!(report.nodes, direct.nodes);
    assert_eq!(serde_json::to_string(&report).unwrap(), line.trim_end());
}

#[test]
fn number_jobs_agree() {
    let single = run(&["number", "--t", "3", "--n", "2", "--cap", "20", "--json"]);
    let multi = run(&[
        "number", "--t", "3", "--n", "2", "--cap", "20", "--jobs", "4", "--json",
    ]);
    let a: NumberReport = serde_json::from_str(&stdout(&single)).unwrap();
    let b: NumberReport = serde_json::from_str(&stdout(&multi)).unwrap();
    assert_eq!(a.value, Some(14));
    assert_eq!(a.value, b.value);
    assert_eq!(a.nodes, b.nodes);
}

#[test]
fn refute_output() {
    let out = run(&["refute", "--set", "1,2,3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "levels: 1 2\n");

    let out = run(&["refute", "--set", "5,6,7", "--json"]);
    let line = stdout(&out);
    let report: RefuteReport = serde_json::from_str(&line).unwrap();
    assert_eq!(report.set, vec![5, 6, 7]);
    assert!(report.levels.is_empty());
    assert_eq!(serde_json::to_string(&report).unwrap(), line.trim_end());

    let out = run(&["refute", "--set", "1,,3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extract_and_check_roundtrip() {
    let dir = scratch("extract");
    let coloring = dir.join("ones.txt");
    let labels = ["1"; 12].join(" ");
    std::fs::write(&coloring, format!("1 12\n{labels}\n")).unwrap();

    let out = run(&[
        "extract",
        coloring.to_str().unwrap(),
        "--n",
        "3",
        "--strategy",
        "proof-trace",
        "--json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let cert: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(cert.witness.entries(), &[2, 2, 2]);
    assert_eq!(serde_json::to_string_pretty(&cert).unwrap(), text.trim_end());

    let cert_path = dir.join("cert.json");
    std::fs::write(&cert_path, &text).unwrap();
    let out = run(&[
        "check-cert",
        coloring.to_str().unwrap(),
        cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "certificate ok\n");

    // Tampered certificate is rejected with exit 1.
    let tampered = text.replacen("\"f\": 2", "\"f\": 3", 1);
    std::fs::write(&cert_path, tampered).unwrap();
    let out = run(&[
        "check-cert",
        coloring.to_str().unwrap(),
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn extract_failure_reports_stage() {
    let dir = scratch("extract-fail");
    let coloring = dir.join("free.txt");
    std::fs::write(&coloring, "2 4\n1 2 2 1\n").unwrap();
    let out = run(&["extract", coloring.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("direct-search"), "got: {err}");
}

#[test]
fn bound_output() {
    let out = run(&["bound", "--t", "1", "--n", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("J_bar(1,2) = 2"));
    assert!(text.contains("J_bar(1,3) = 9"));

    let out = run(&["bound", "--t", "1", "--n", "3", "--json"]);
    let line = stdout(&out);
    let report: BoundReport = serde_json::from_str(&line).unwrap();
    assert_eq!(report.value, "9");
    assert_eq!(serde_json::to_string(&report).unwrap(), line.trim_end());

    // Unknown Ramsey cells are reported as infeasible.
    let out = run(&["bound", "--t", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn extremal_output() {
    let out = run(&["extremal", "--t", "2", "--n", "2", "--cap", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2 4\n1 2 2 1\n");

    let out = run(&["extremal", "--t", "2", "--n", "2", "--cap", "5", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let line = stdout(&out);
    let report: ExtremalReport = serde_json::from_str(&line).unwrap();
    assert!(!report.found);
    assert!(report.coloring.is_none());
    assert_eq!(serde_json::to_string(&report).unwrap(), line.trim_end());
}
