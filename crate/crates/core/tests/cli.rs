use std::path::Path;
use std::process::Command;

use splinequad::cli::{run, RuleDocument, EXIT_CHECK_FAILED, EXIT_ERROR, EXIT_OK, EXIT_WARNINGS};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        std::iter::once("splinequad").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn gen_table_1() -> String {
    let (code, out, err) = call(&[
        "gen",
        "--continuity",
        "0",
        "--degree",
        "4",
        "--knots",
        "0,1,2,3,4",
        "--middle",
        "3",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    out
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn gen_emits_a_parsable_deterministic_document() {
    let text = gen_table_1();
    assert_eq!(text, gen_table_1());
    let doc = RuleDocument::from_json(&text).unwrap();
    assert_eq!(doc.to_json(), text);
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.omega_policy, "node-left");
    assert!((doc.omega - 1.4).abs() < 1e-12);
    let nodes: Vec<f64> = doc
        .subintervals
        .iter()
        .flat_map(|s| s.nodes.clone())
        .collect();
    assert_eq!(nodes.len(), 9);
    assert!((nodes[4] - 2.0).abs() < 1e-12);
    assert!((doc.checks.weight_sum - 4.0).abs() < 1e-12);
    assert!(doc.checks.max_defect < 1e-12);
    // 17 significant digits
    assert!(text.contains("4.0000000000000000e0"));
}

#[test]
fn document_round_trips_to_the_same_rule() {
    let doc = RuleDocument::from_json(&gen_table_1()).unwrap();
    let rule = doc.to_rule().unwrap();
    assert_eq!(RuleDocument::from_rule(&rule).unwrap(), doc);
}

#[test]
fn csv_has_one_row_per_node() {
    let (code, out, _) = call(&[
        "gen",
        "--continuity",
        "1",
        "--degree",
        "7",
        "--knots",
        "0,1,3,7,9",
        "--middle",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut rows = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(
        rows.headers().unwrap(),
        vec!["subinterval", "kind", "node", "weight"]
    );
    let records: Vec<_> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), 13);
    assert_eq!(&records[12][1], "Q-reflected");
    let total: f64 = records.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((total - 9.0).abs() < 1e-10);
}

#[test]
fn verify_passes_and_reports_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", &gen_table_1());
    let (code, out, _) = call(&["verify", &good]);
    assert_eq!(code, EXIT_OK);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["pass"], true);

    let mut doc = RuleDocument::from_json(&gen_table_1()).unwrap();
    doc.subintervals[1].weights[0] += 1e-6;
    let bad = write(dir.path(), "bad.json", &doc.to_json());
    let (code, _, err) = call(&["verify", &bad]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(err.contains("FAIL") && err.contains("basis index"), "{err}");

    let (code, _, err) = call(&["verify", &good, "--degree", "6"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("space mismatch"), "{err}");
}

#[test]
fn malformed_documents_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "garbage.json", "{ not json");
    assert_eq!(call(&["verify", &garbage]).0, EXIT_ERROR);

    let mut doc = RuleDocument::from_json(&gen_table_1()).unwrap();
    doc.subintervals[0].weights.pop();
    let short = write(dir.path(), "short.json", &doc.to_json());
    let (code, _, err) = call(&["verify", &short]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("malformed"), "{err}");

    assert_eq!(call(&["verify", "/nonexistent/rule.json"]).0, EXIT_ERROR);
}

#[test]
fn unsupported_configurations_exit_with_error() {
    let (code, _, err) = call(&[
        "gen",
        "--continuity",
        "1",
        "--degree",
        "6",
        "--knots",
        "0,1,2",
    ]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("1/2-rule unsupported"), "{err}");
    assert_eq!(
        call(&[
            "gen",
            "--continuity",
            "2",
            "--degree",
            "7",
            "--knots",
            "0,1,2"
        ])
        .0,
        EXIT_ERROR
    );
    assert_eq!(
        call(&[
            "gen",
            "--continuity",
            "0",
            "--degree",
            "4",
            "--knots",
            "0,2,1"
        ])
        .0,
        EXIT_ERROR
    );
    assert_eq!(
        call(&[
            "gen",
            "--continuity",
            "1",
            "--degree",
            "5",
            "--knots",
            "0,1,2",
            "--omega-policy",
            "value=0.5"
        ])
        .0,
        EXIT_ERROR
    );
    assert_eq!(call(&["table", "6"]).0, EXIT_ERROR);
    assert_eq!(call(&["frobnicate"]).0, EXIT_ERROR);
}

#[test]
fn out_of_span_nodes_exit_with_warnings() {
    // middle at the far end for continuity 1 puts nodes outside their spans
    let (code, out, err) = call(&[
        "gen",
        "--continuity",
        "1",
        "--degree",
        "5",
        "--knots",
        "0,1,2,3,4,5",
        "--middle",
        "5",
    ]);
    assert_eq!(code, EXIT_WARNINGS, "{err}");
    assert!(err.contains("warning"));
    let doc = RuleDocument::from_json(&out).unwrap();
    assert!(!doc.checks.warnings.is_empty());
}

#[test]
fn table_command_reports_pass() {
    for id in ["1", "5"] {
        let (code, out, _) = call(&["table", id]);
        assert_eq!(code, EXIT_OK);
        let report: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(report["pass"], true);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rule.json");
    let (code, out, _) = call(&[
        "gen",
        "--continuity",
        "0",
        "--degree",
        "4",
        "--knots",
        "0,1,2,3,4",
        "--middle",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), gen_table_1());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_splinequad");
    let status = Command::new(bin).args(["table", "3"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    let status = Command::new(bin).args(["table", "9"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_ERROR));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&help.stdout).contains("gen"));
}
