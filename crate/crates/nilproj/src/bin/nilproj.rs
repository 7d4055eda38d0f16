//! Command-line front end: group validation, kernel evaluation, the
//! verification suite, Abel reconstruction and `Q_m` export.
//!
//! Exit status: `0` success, `1` check failure or runtime error, `2` usage
//! or configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Parser, Subcommand, ValueEnum};
use nilproj::config::Config;
use nilproj::engine::{Engine, SliceKernel};
use nilproj::grid::Grid;
use nilproj::suite::{run_suite, Status};
use nilproj::{io, Error};
use nilproj_core::{KernelEvaluator, C64};

#[derive(Parser)]
#[command(name = "nilproj", version, about = "Spectral projection kernels on step-two nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Closed-form sphere sum, falling back to the contour form near `y = 0`.
    Auto,
    /// Closed-form sphere sum (`y ≠ 0`).
    Sphere,
    /// Contour representation (valid on `y = 0`).
    Contour,
    /// Independent radial-quadrature oracle (`y ≠ 0`).
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the configuration and validate the group and grid.
    Validate {
        /// Configuration file.
        config: PathBuf,
    },
    /// Evaluate `P_m` at the points of a CSV file.
    EvalKernel {
        /// Configuration file.
        config: PathBuf,
        /// Level.
        #[arg(long)]
        m: usize,
        /// Points CSV `y1,…,y2n,t1,…,tr`.
        #[arg(long)]
        points: PathBuf,
        /// Output CSV `y…,t…,m,re,im`.
        #[arg(long)]
        out: PathBuf,
        /// Kernel representation.
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Run the verification suite and write a JSON report.
    Check {
        /// Configuration file.
        config: PathBuf,
        /// Comma-separated subset of checks.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        /// Output JSON report.
        #[arg(long)]
        report: PathBuf,
        /// Worker threads (overrides the configuration and the environment).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Abel reconstruction `Σ_{m ≤ M} R^m ℙ_m f` of a sampled function.
    Reconstruct {
        /// Configuration file.
        config: PathBuf,
        /// Input sample container.
        #[arg(long)]
        input: PathBuf,
        /// Abel parameter in `[0, 1)`.
        #[arg(long = "R")]
        r: f64,
        /// Truncation order, or `inf` for the closed-form generating kernel.
        #[arg(long = "M", default_value = "inf")]
        m: String,
        /// Output sample container.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Export `Q_m(·, τ)` on a `y` grid as CSV.
    ExportQm {
        /// Configuration file.
        config: PathBuf,
        /// Level.
        #[arg(long)]
        m: usize,
        /// Frequency `τ` (`r` values).
        #[arg(long, num_args = 1.., allow_negative_numbers = true, required = true)]
        tau: Vec<f64>,
        /// `y` grid as `EXTENT:POINTS` (default: the configured grid).
        #[arg(long)]
        grid: Option<String>,
        /// Output CSV `y1,…,y2n,re,im`.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
    Checks,
}

fn load(path: &Path) -> Result<Config, Failure> {
    Config::load(path).with_context(|| format!("loading {}", path.display())).map_err(Failure::Usage)
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let cfg = load(path)?;
    let g = cfg.group().map_err(usage)?;
    KernelEvaluator::new(&g, cfg.kernel.to_kernel_config()).map_err(|e| usage(Error::from(e)))?;
    println!(
        "ok: n = {}, r = {}, Q = {}, sigma range over unit tau [{:.6e}, {:.6e}]",
        g.n, g.r, g.q, g.sigma_min, g.sigma_max
    );
    println!(
        "quasi-triangle constant (measured lower bound): {:.6}",
        g.triangle_constant_estimate(nilproj::suite::TRIANGLE_SAMPLES, cfg.seed)
    );
    match cfg.main_grid() {
        Ok(grid) => println!("grid: {} samples", grid.len()),
        Err(e) => {
            println!("note: the configured grid is unusable for this group ({e}); grid operations will be skipped")
        }
    }
    println!("fingerprint {}", cfg.fingerprint());
    Ok(())
}

fn eval_kernel(config: &Path, m: usize, points: &Path, out: &Path, method: Method) -> Result<(), Failure> {
    let cfg = load(config)?;
    let g = cfg.group().map_err(usage)?;
    let ev = KernelEvaluator::new(&g, cfg.kernel.to_kernel_config()).map_err(|e| usage(Error::from(e)))?;
    let pts = io::read_points_csv(points, g.n, g.r).map_err(usage)?;
    let values = pts
        .iter()
        .map(|p| match method {
            Method::Auto => ev.p_m_any(m, &p.y, &p.t),
            Method::Sphere => ev.p_m(m, &p.y, &p.t),
            Method::Contour => ev.p_m_continued(m, &p.y, &p.t),
            Method::Oracle => ev.p_m_oracle(m, &p.y, &p.t),
        })
        .collect::<Result<Vec<C64>, _>>()
        .map_err(|e| runtime(Error::from(e)))?;
    io::write_kernel_csv(out, &pts, m, &values).map_err(runtime)?;
    println!("wrote {} values to {}", values.len(), out.display());
    Ok(())
}

fn check(config: &Path, only: Option<Vec<String>>, report: &Path, workers: Option<usize>) -> Result<(), Failure> {
    let cfg = load(config)?;
    let workers = cfg.resolve_workers(workers);
    let rep = run_suite(&cfg, only.as_deref(), workers).map_err(usage)?;
    std::fs::write(report, rep.to_json())
        .with_context(|| format!("writing {}", report.display()))
        .map_err(Failure::Runtime)?;
    if let Some(e) = &rep.group_error {
        eprintln!("group validation failed: {e}");
    }
    for c in &rep.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let detail: Vec<String> =
            c.residuals.iter().map(|r| format!("{}={:.3e}/{:.1e}", r.name, r.value, r.tolerance)).collect();
        let note = c.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
        println!("{status} {:<26} {}{note}", c.name, detail.join(" "));
    }
    let s = &rep.summary;
    println!("{} passed, {} failed, {} skipped; report {}", s.passed, s.failed, s.skipped, report.display());
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn reconstruct(
    config: &Path,
    input: &Path,
    r: f64,
    m: &str,
    out: &Path,
    workers: Option<usize>,
) -> Result<(), Failure> {
    let cfg = load(config)?;
    let g = cfg.group().map_err(usage)?;
    let m_max = match m.trim() {
        "inf" | "infinity" | "∞" => None,
        v => Some(v.parse::<usize>().map_err(|e| usage(anyhow::anyhow!("--M {v}: {e}")))?),
    };
    let f = io::read_container(input).map_err(runtime)?;
    let engine = Engine::new(&g, f.grid, cfg.resolve_workers(workers)).map_err(usage)?;
    let rec = engine.abel_reconstruct(&f, r, m_max).map_err(runtime)?;
    io::write_container(out, &rec).map_err(runtime)?;
    println!("wrote {} samples to {}", rec.values.len(), out.display());
    Ok(())
}

fn parse_grid(spec: &str) -> anyhow::Result<(f64, usize)> {
    let (e, p) = spec.split_once(':').context("expected EXTENT:POINTS")?;
    Ok((e.trim().parse()?, p.trim().parse()?))
}

fn export_qm(config: &Path, m: usize, tau: &[f64], grid: Option<&str>, out: &Path) -> Result<(), Failure> {
    let cfg = load(config)?;
    let g = cfg.group().map_err(usage)?;
    if tau.len() != g.r {
        return Err(usage(anyhow::anyhow!("--tau needs {} values, got {}", g.r, tau.len())));
    }
    let (extent, points) = match grid {
        Some(s) => parse_grid(s).map_err(usage)?,
        None => (cfg.grid.y_extent, cfg.grid.y_points),
    };
    let grid = Grid::new(2 * g.n, extent, points, g.r, 1.0, 2).map_err(usage)?;
    let engine = Engine::new(&g, grid, 1).map_err(usage)?;
    let values = engine.kernel_slice(SliceKernel::Level(m), tau).map_err(runtime)?;
    io::write_y_values_csv(out, engine.grid(), &values).map_err(runtime)?;
    println!("wrote {} values to {}", values.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { config } => validate(config),
        Command::EvalKernel { config, m, points, out, method } => eval_kernel(config, *m, points, out, *method),
        Command::Check { config, only, report, workers } => check(config, only.clone(), report, *workers),
        Command::Reconstruct { config, input, r, m, out, workers } => reconstruct(config, input, *r, m, out, *workers),
        Command::ExportQm { config, m, tau, grid, out } => export_qm(config, *m, tau, grid.as_deref(), out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
