//! Exit-code and report-shape contract of the `needle` dispatcher,
//! exercised through the library entry point the binary wraps.

use needlework::cli::run;
use serde_json::Value;
use std::path::Path;

fn needle(args: &[&str]) -> i32 {
    let argv = std::iter::once("needle".to_string()).chain(args.iter().map(|s| s.to_string()));
    run(argv)
}

fn read_report(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).expect("report file");
    serde_json::from_str(&text).expect("report JSON")
}

#[test]
fn kakeya_build_reports_small_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let code = needle(&["kakeya", "build", "--q", "5", "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = read_report(&out);
    assert_eq!(report["outputs"]["size"]["value"], "17");
    assert_eq!(report["outputs"]["size"]["exactness"], "exact-rational");
    for assertion in report["assertions"].as_array().unwrap() {
        assert_eq!(assertion["status"], "pass", "failed: {assertion}");
    }
}

#[test]
fn kakeya_pipeline_chains_through_out_files() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("witness.json");
    assert_eq!(
        needle(&["kakeya", "build", "--q", "3", "--n", "2", "--out", witness.to_str().unwrap()]),
        0
    );
    assert_eq!(needle(&["kakeya", "verify", "--in", witness.to_str().unwrap()]), 0);
    assert_eq!(needle(&["kakeya", "certify", "--in", witness.to_str().unwrap()]), 0);
}

#[test]
fn zero_error_correction_is_certain() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("f.json");
    let word = dir.path().join("w.json");
    std::fs::write(&poly, r#"[{"e":[2,1],"c":3},{"e":[0,0],"c":4}]"#).unwrap();
    assert_eq!(
        needle(&[
            "lcc", "encode", "--q", "5", "--m", "2", "--e", "3",
            "--poly", poly.to_str().unwrap(), "--out", word.to_str().unwrap(),
        ]),
        0
    );
    let out = dir.path().join("report.json");
    assert_eq!(
        needle(&[
            "lcc", "correct", "--word", word.to_str().unwrap(), "--pos", "7",
            "--errors", "0", "--out", out.to_str().unwrap(),
        ]),
        0
    );
    let report = read_report(&out);
    assert_eq!(report["outputs"]["success_rate"]["value"], 1.0);
}

#[test]
fn reports_are_deterministic_up_to_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("f.json");
    let word = dir.path().join("w.json");
    std::fs::write(&poly, r#"[{"e":[1,1],"c":2}]"#).unwrap();
    needle(&[
        "lcc", "encode", "--q", "5", "--m", "2", "--e", "3",
        "--poly", poly.to_str().unwrap(), "--out", word.to_str().unwrap(),
    ]);
    let args = [
        "lcc", "correct", "--word", word.to_str().unwrap(), "--pos", "3",
        "--errors", "1", "--seed", "42", "--trials", "2000",
    ];
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    for out in [&first, &second] {
        let mut argv: Vec<&str> = args.to_vec();
        argv.extend(["--out", out.to_str().unwrap()]);
        assert_eq!(needle(&argv), 0);
    }
    let mut a = read_report(&first);
    let mut b = read_report(&second);
    a["wall_time_ms"] = Value::Null;
    b["wall_time_ms"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn bad_invocations_exit_two() {
    assert_eq!(needle(&["frobnicate"]), 2);
    assert_eq!(needle(&["kakeya", "build", "--q", "5", "--n", "2", "--bogus"]), 2);
    assert_eq!(needle(&["kakeya", "verify", "--in", "/no/such/file.json"]), 2);
    assert_eq!(needle(&["suite", "unknown"]), 2);
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "not json at all").unwrap();
    assert_eq!(needle(&["kakeya", "certify", "--in", junk.to_str().unwrap()]), 2);
}

#[test]
fn enumeration_cap_is_enforced() {
    assert_eq!(needle(&["kakeya", "build", "--q", "13", "--n", "3", "--cap", "100"]), 2);
    assert_eq!(needle(&["kakeya", "build", "--q", "3", "--n", "2", "--cap", "100"]), 0);
}

#[test]
fn failed_assertions_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("m.csv");
    let target = dir.path().join("t.json");
    // Not exactly scalable: the descent cannot reach the tolerance in
    // a finite iteration budget, so the report carries a failing check.
    std::fs::write(&matrix, "1,1\n0,1\n").unwrap();
    std::fs::write(&target, r#"{"rows":[1.0,1.0],"cols":[1.0,1.0]}"#).unwrap();
    let out = dir.path().join("report.json");
    let code = needle(&[
        "scale", "potential", "--matrix", matrix.to_str().unwrap(),
        "--target", target.to_str().unwrap(), "--max-iters", "200",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let report = read_report(&out);
    assert_eq!(report["assertions"][0]["status"], "fail");
}

#[test]
fn csv_format_renders_sections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    assert_eq!(
        needle(&["incidence", "grid", "--M", "2", "--format", "csv", "--out", out.to_str().unwrap()]),
        0
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("section,name,status,lhs,rhs"));
    assert!(text.contains("assertion,grid-incidences,pass,16,16"));
}

#[test]
fn suite_filter_runs_matching_criteria_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    assert_eq!(
        needle(&["suite", "acceptance", "--filter", "joints", "--out", out.to_str().unwrap()]),
        0
    );
    let report = read_report(&out);
    let names: Vec<&str> = report["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|a| a["name"].as_str())
        .filter(|n| n.starts_with("criterion-"))
        .collect();
    assert_eq!(names, vec!["criterion-joints-grid"]);
}
