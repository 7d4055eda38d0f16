//! Suite behaviour: selection, determinism, overrides and degenerate groups.

use nilproj::config::Config;
use nilproj::suite::{run_suite, select_checks, Status, CHECK_NAMES};
use nilproj::Error;

const H1: &str = r#"{"n": 1, "r": 1, "B": [[[0, -1], [1, 0]]], "seed": 7}"#;
const QUICK: [&str; 3] = ["laguerre_addition", "qm_sum", "conjugate_symmetry"];

fn quick() -> Vec<String> {
    QUICK.iter().map(|s| s.to_string()).collect()
}

#[test]
fn selection_is_ordered_and_deduplicated() {
    let c = Config::from_json(H1).unwrap();
    let only: Vec<String> =
        ["qm_sum", "normalization", "qm_sum", " byy_identity "].iter().map(|s| s.to_string()).collect();
    assert_eq!(select_checks(&c, Some(&only)).unwrap(), vec!["normalization", "byy_identity", "qm_sum"]);
    assert_eq!(select_checks(&c, None).unwrap(), CHECK_NAMES.to_vec());
    assert_eq!(select_checks(&c, Some(&[])).unwrap(), CHECK_NAMES.to_vec());
}

#[test]
fn unknown_check_is_a_configuration_error() {
    let c = Config::from_json(H1).unwrap();
    let only = vec!["no_such_check".to_string()];
    assert!(matches!(run_suite(&c, Some(&only), 1), Err(Error::Config(_))));
}

#[test]
fn reports_are_reproducible_across_workers() {
    let c = Config::from_json(H1).unwrap();
    let a = run_suite(&c, Some(&quick()), 1).unwrap();
    let b = run_suite(&c, Some(&quick()), 3).unwrap();
    assert!(a.passed(), "{}", a.to_json());
    assert_eq!(a.checks.len(), QUICK.len());
    // Only the recorded worker count may differ.
    let strip = |s: String| s.lines().filter(|l| !l.contains("\"workers\"")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(a.to_json()), strip(b.to_json()));
    let v: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["summary"]["total"], 3);
    assert_eq!(v["fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn tolerance_override_turns_a_pass_into_a_fail() {
    let c = Config::from_json(H1).unwrap();
    let only = vec!["qm_sum".to_string()];
    assert!(run_suite(&c, Some(&only), 1).unwrap().passed());
    let strict = Config::from_json(
        r#"{"n": 1, "r": 1, "B": [[[0, -1], [1, 0]]], "seed": 7, "suite": {"tolerances": {"qm_sum": -1.0}}}"#,
    )
    .unwrap();
    let rep = run_suite(&strict, Some(&only), 1).unwrap();
    assert!(!rep.passed());
    let rec = rep.check("qm_sum").unwrap();
    assert_eq!(rec.status, Status::Fail);
    assert!(rec.residuals.iter().all(|r| r.tolerance == -1.0 && !r.pass));
}

#[test]
fn degenerate_group_fails_every_check() {
    let c = Config::from_json(r#"{"n": 1, "r": 1, "B": [[[0, 0], [0, 0]]]}"#).unwrap();
    let rep = run_suite(&c, None, 1).unwrap();
    assert!(!rep.passed());
    assert!(rep.group.is_none());
    assert!(rep.group_error.as_deref().unwrap().contains("degenerate"));
    assert_eq!(rep.checks.len(), CHECK_NAMES.len());
    assert!(rep.checks.iter().all(|c| c.status == Status::Fail && c.error.is_some()));
}

#[test]
fn oversized_grids_are_skipped_not_failed() {
    let c = Config::from_json(r#"{"n": 2, "r": 1, "B": [[[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -2], [0, 0, 2, 0]]]}"#)
        .unwrap();
    let only = vec!["projection_laws".to_string(), "abel_reconstruction".to_string()];
    let rep = run_suite(&c, Some(&only), 1).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    assert!(rep.checks.iter().all(|c| c.status == Status::Skipped && c.error.is_some()));
}
