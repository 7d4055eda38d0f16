//! Command-line behaviour: exit codes and output files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nilproj::engine::Engine;
use nilproj::grid::{Grid, SampledFunction};
use nilproj::io;
use nilproj_core::group::examples::heisenberg;
use nilproj_core::C64;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilproj")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", s(&config("h1.json"))]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("fingerprint"));

    let bad = run(&["validate", s(&config("degenerate.json"))]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("degenerate"));

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&run(&["validate", s(&junk)])), 2);
    assert_eq!(code(&run(&["validate", s(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["eval-kernel", s(&config("h1.json"))])), 2);
}

#[test]
fn eval_kernel_writes_values() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    let out = dir.path().join("out.csv");
    std::fs::write(&pts, "y1,y2,t1\n0.7,-0.2,0.3\n0,0,1.5\n").unwrap();
    let o = run(&["eval-kernel", s(&config("h1.json")), "--m", "2", "--points", s(&pts), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("y1,y2,t1,m,re,im\n"), "{text}");
    assert!(text.lines().nth(1).unwrap().contains(",2,"));
    let vals = io::read_kernel_csv(&out).unwrap();
    assert_eq!(vals.len(), 2);
    assert!(vals.iter().all(|v| v.re.is_finite() && v.im.abs() <= 1e-9 * v.re.abs().max(1.0)));

    let contour = dir.path().join("contour.csv");
    let o = run(&[
        "eval-kernel",
        s(&config("h1.json")),
        "--m",
        "2",
        "--points",
        s(&pts),
        "--out",
        s(&contour),
        "--method",
        "contour",
    ]);
    assert_eq!(code(&o), 0);
    let c = io::read_kernel_csv(&contour).unwrap();
    for (a, b) in vals.iter().zip(&c) {
        assert!((a - b).norm() <= 1e-8 * a.norm().max(1e-3));
    }

    // The sphere form is undefined on the centre.
    let o = run(&[
        "eval-kernel",
        s(&config("h1.json")),
        "--m",
        "2",
        "--points",
        s(&pts),
        "--out",
        s(&contour),
        "--method",
        "sphere",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn check_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = run(&[
        "check",
        s(&config("h1.json")),
        "--only",
        "byy_identity,qm_sum",
        "--report",
        s(&report),
        "--workers",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["seed"], 20240611);
    assert_eq!(v["workers"], 2);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    for c in checks {
        assert_eq!(c["status"], "pass");
        for key in ["name", "parameters", "residuals", "tolerance", "runtime_ms"] {
            assert!(c.get(key).is_some(), "{key}");
        }
    }

    let bad = run(&["check", s(&config("degenerate.json")), "--only", "qm_sum", "--report", s(&report)]);
    assert_eq!(code(&bad), 1);
    let unknown = run(&["check", s(&config("h1.json")), "--only", "nope", "--report", s(&report)]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn export_qm_writes_the_y_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("qm.csv");
    let o = run(&["export-qm", s(&config("h1.json")), "--m", "1", "--tau", "-1.5", "--grid", "3:16", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let vals = io::read_kernel_csv(&out).unwrap();
    assert_eq!(vals.len(), 256);
    let o = run(&["export-qm", s(&config("h1.json")), "--m", "1", "--tau", "1", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reconstruct_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    std::fs::write(&cfg, r#"{"n": 1, "r": 1, "B": [[[0, -1], [1, 0]]], "grid": {"y_extent": 5, "y_points": 16, "t_extent": 8, "t_points": 32}}"#)
        .unwrap();
    let grid = Grid::new(2, 5.0, 16, 1, 8.0, 32).unwrap();
    let f = SampledFunction::from_fn(grid, |y, t| {
        let q: f64 = y.iter().chain(t).map(|v| v * v).sum();
        C64::new((-0.5 * q).exp(), 0.0)
    });
    let input = dir.path().join("in.bin");
    let out = dir.path().join("out.bin");
    io::write_container(&input, &f).unwrap();
    let o = run(&[
        "reconstruct",
        s(&cfg),
        "--input",
        s(&input),
        "--R",
        "0.5",
        "--M",
        "4",
        "--out",
        s(&out),
        "--workers",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let got = io::read_container(&out).unwrap();
    let expect = Engine::new(&heisenberg(), grid, 1)
        .unwrap()
        .abel_reconstruct(&io::read_container(&input).unwrap(), 0.5, Some(4))
        .unwrap();
    // The container stores single precision.
    assert!(got.l2_distance(&expect).unwrap() <= 1e-6 * expect.l2_norm());
    let o = run(&["reconstruct", s(&cfg), "--input", s(&input), "--R", "1.5", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
}
