//! Acceptance gate: one line per criterion, `PASS` or `FAIL`, with the
//! measured residuals, tolerances and wall-clock times. Exits nonzero when
//! any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use nilproj::config::{Config, GridSection};
use nilproj::suite::{run_suite, CheckRecord, Report, Status};

fn load(name: &str) -> Config {
    Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).expect("bundled config")
}

fn suite(cfg: &Config, checks: &[&str]) -> Report {
    let only: Vec<String> = checks.iter().map(|s| s.to_string()).collect();
    run_suite(cfg, Some(&only), 0).expect("suite runs")
}

/// Residuals of a record as `name=value/tol`.
fn detail(rec: &CheckRecord) -> String {
    let mut s: Vec<String> =
        rec.residuals.iter().map(|r| format!("{}={:.2e}/{:.0e}", r.name, r.value, r.tolerance)).collect();
    if let Some(e) = &rec.error {
        s.push(format!("[{e}]"));
    }
    s.join(" ")
}

fn residual(rec: &CheckRecord, name: &str) -> f64 {
    rec.residuals.iter().find(|r| r.name == name).map_or(f64::NAN, |r| r.value)
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn line(&mut self, id: &str, title: &str, pass: bool, elapsed: Duration, body: String) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "{} criterion {id:<3} {title}: {body} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }

    /// Runs `checks` on every labelled config; passes when all pass (a
    /// skipped check fails the criterion) and the time budget holds.
    fn suite_line(&mut self, id: &str, title: &str, runs: &[(&str, Config)], checks: &[&str], budget: Option<f64>) {
        let start = Instant::now();
        let mut pass = true;
        let mut parts = Vec::new();
        for (label, cfg) in runs {
            let rep = suite(cfg, checks);
            for rec in &rep.checks {
                pass &= rec.status == Status::Pass;
                parts.push(format!("{label}/{} {}", rec.name, detail(rec)));
            }
        }
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            pass &= elapsed.as_secs_f64() < limit;
            parts.push(format!("budget {limit} s"));
        }
        self.line(id, title, pass, elapsed, parts.join("; "));
    }
}

fn with_samples(mut cfg: Config, normalization: usize, kernel: usize) -> Config {
    cfg.suite.normalization_samples = normalization;
    cfg.suite.kernel_samples = kernel;
    cfg
}

fn main() {
    let mut gate = Gate { failures: 0 };
    let h1 = load("h1.json");
    let aniso = load("anisotropic_n2_r1.json");
    let aniso2 = load("anisotropic_n2_r2.json");
    let quat = load("quaternionic.json");

    let three = |norm, kernel| {
        vec![
            ("H1", with_samples(h1.clone(), norm, kernel)),
            ("aniso_r1", with_samples(aniso.clone(), norm, kernel)),
            ("quaternionic", with_samples(quat.clone(), norm, kernel)),
        ]
    };

    gate.suite_line("1", "normalization (1000 tau per group)", &three(1000, 20), &["normalization"], Some(10.0));

    let mut kernel_groups = three(1000, 100);
    kernel_groups.push(("aniso_r2", with_samples(aniso2.clone(), 1000, 100)));
    gate.suite_line(
        "2",
        "representation agreement (100 points per group, m in {0,1,2,5})",
        &kernel_groups,
        &["representation_agreement"],
        Some(120.0),
    );
    gate.suite_line(
        "3",
        "homogeneity and conjugate symmetry (same samples)",
        &kernel_groups,
        &["homogeneity", "conjugate_symmetry"],
        None,
    );

    gate.suite_line(
        "4",
        "mean value zero (m <= 5)",
        &[("H1", h1.clone()), ("aniso_r1", aniso.clone())],
        &["mean_value_zero"],
        Some(300.0),
    );
    gate.suite_line(
        "5",
        "twisted orthogonality (H1, 128^2, tau = 1, m <= 4)",
        &[("H1", h1.clone())],
        &["twisted_orthogonality"],
        None,
    );
    gate.suite_line(
        "6",
        "eigenfunction relation, fourth-order convergence",
        &[("H1", h1.clone()), ("aniso_r1", aniso.clone()), ("quaternionic", quat.clone())],
        &["eigenfunction"],
        None,
    );
    gate.suite_line(
        "7",
        "norm identities",
        &[("H1", h1.clone()), ("aniso_r1", aniso.clone()), ("quaternionic", quat.clone())],
        &["norm_identities"],
        None,
    );

    // Projection laws on the default grid, then with the t extent doubled
    // at fixed spacing; the criterion requires the residuals to halve.
    let start = Instant::now();
    let base = suite(&h1, &["projection_laws"]);
    let base_rec = &base.checks[0];
    gate.line(
        "8a",
        "projection laws on the H1 default grid",
        base_rec.status == Status::Pass,
        start.elapsed(),
        detail(base_rec),
    );

    let start = Instant::now();
    let mut wide = h1.clone();
    wide.grid = GridSection { t_extent: 2.0 * h1.grid.t_extent, t_points: 2 * h1.grid.t_points, ..h1.grid };
    let wide_rep = suite(&wide, &["projection_laws"]);
    let wide_rec = &wide_rep.checks[0];
    let mut tall = h1.clone();
    tall.grid = GridSection { y_extent: 2.0 * h1.grid.y_extent, y_points: 2 * h1.grid.y_points, ..h1.grid };
    let tall_rep = suite(&tall, &["projection_laws"]);
    let tall_rec = &tall_rep.checks[0];
    let names = ["idempotence", "orthogonality_1_0", "orthogonality_0_1"];
    let halves = names.iter().all(|n| residual(wide_rec, n) <= 0.5 * residual(base_rec, n));
    let ratios: Vec<String> =
        names.iter().map(|n| format!("{n} x{:.2}", residual(wide_rec, n) / residual(base_rec, n))).collect();
    let ratios_y: Vec<String> =
        names.iter().map(|n| format!("{n} x{:.1e}", residual(tall_rec, n) / residual(base_rec, n))).collect();
    gate.line(
        "8b",
        "projection residuals halve when the t extent doubles",
        halves,
        start.elapsed(),
        format!(
            "t extent doubled: {} [{}]; y extent doubled instead: {} [{}]",
            ratios.join(", "),
            detail(wide_rec),
            ratios_y.join(", "),
            detail(tall_rec)
        ),
    );

    gate.suite_line(
        "9",
        "Abel reconstruction and energy completeness (H1 Gaussian)",
        &[("H1", h1.clone())],
        &["abel_reconstruction", "bessel_completeness"],
        None,
    );
    gate.suite_line(
        "10",
        "size statistics, dyadic invariance (m <= 2)",
        &[("H1", h1.clone()), ("aniso_r1", aniso.clone()), ("quaternionic", quat.clone())],
        &["cz_size"],
        None,
    );

    println!("{} of 11 criterion lines failed", gate.failures);
    if gate.failures > 0 {
        std::process::exit(1);
    }
}
