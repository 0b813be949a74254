//! End-to-end tests of the command-line interface.

use std::process::{Command, Output};

fn shangles(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shangles"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = shangles(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn fvector_matches_documented_example() {
    let out = stdout(&["fvector", "1,3,2,4,5"]);
    assert!(out.starts_with("fvector: 4 4\n"), "got: {out}");
}

#[test]
fn analyze_reports_dipole() {
    let out = stdout(&["analyze", "1,2,1,4,3,4"]);
    assert!(out.contains("dipole tie-breaking: light pole 2, heavy pole 5"), "got: {out}");
    assert!(out.contains("majority dominant: yes"));
}

#[test]
fn duality_json_heptagon() {
    let out = stdout(&["duality", "1,1,1,1,1,1,1", "--json"]);
    let report: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(report["verdict"], serde_json::json!(true));
    assert_eq!(report["witness"], serde_json::json!([5, 3, 1, 6, 4, 2, 7]));
}

#[test]
fn sweep_reports_critical_values() {
    let out = stdout(&["sweep", "1,3,1,4,2,?", "--from", "4", "--to", "12"]);
    assert!(out.starts_with("critical values: 5 7 9 11\n"), "got: {out}");
    assert!(out.contains("sigma = 10: full-dimensional  fvector (4,6,4)"));
    assert!(out.contains("sigma = 12: empty"));

    // The --index form marks an entry of a plain necklace.
    let by_index = stdout(&["sweep", "1,3,1,4,2,9", "--index", "6", "--from", "4", "--to", "12"]);
    assert_eq!(out, by_index);
}

#[test]
fn lattice_output_is_byte_identical_across_runs() {
    let a = stdout(&["lattice", "1,3,1,4,2,4"]);
    let b = stdout(&["lattice", "1,3,1,4,2,4"]);
    assert_eq!(a, b);
    assert!(a.starts_with("{\"faces\":["));
    assert!(a.trim_end().ends_with("\"n\":6}"));
}

#[test]
fn vertices_json_carries_realizations() {
    let out = stdout(&["vertices", "1,1,1,1,1,1", "--json"]);
    let report: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    let digons = report["digon_vertices"].as_array().unwrap();
    assert_eq!(digons.len(), 3);
    let lengths = digons[0]["realization"]["lengths"].as_array().unwrap();
    assert_eq!(lengths.iter().filter(|v| v.as_f64() == Some(0.5)).count(), 2);
}

#[test]
fn tours_counts() {
    let out = stdout(&["tours", "7"]);
    assert!(out.starts_with("n = 7: 14 small tours, 14 odd tours (formula 14)"), "got: {out}");
}

#[test]
fn oracle_check_agrees() {
    let out = stdout(&["oracle-check", "4", "7"]);
    assert!(out.contains("14 facets"));
    assert!(out.contains("agree"));
    assert!(!out.contains("DISAGREE"));
}

#[test]
fn scmap_regular_pentagon() {
    let out = stdout(&["scmap", "--lengths", "1,1,1,1,1"]);
    let image: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    for l in image["image_lengths"].as_array().unwrap() {
        assert!((l.as_f64().unwrap() - 0.2).abs() < 1e-8);
    }
    assert!(image["closure_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn exit_codes_distinguish_error_classes() {
    // Domain error: parse failure names the offending token.
    let out = shangles(&["fvector", "1,x,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"x\""));

    // Domain error: empty polytope has no lattice.
    let out = shangles(&["lattice", "1,3,1,4,2,12"]);
    assert_eq!(out.status.code(), Some(1));

    // Usage error: unknown subcommand.
    let out = shangles(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
