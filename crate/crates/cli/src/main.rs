//! `aniso`: eigenpairs, barrier-sandwiched solves and lambda ladders from the
//! command line.
//!
//! Exit codes: 0 pass, 1 numerical failure, 2 usage, 3 outside the theory.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{CommandFactory, Parser, Subcommand};
use serde::Serialize;

use aniso_core::{
    lambda_scan, pi_p, solve_eigenpair, solve_problem, BarrierError, Interval, Regime, ScanOptions, SolveError,
};
use config::Config;
use output::{out_dir, write_eigen_csv, write_field, write_json, write_ladder};

#[derive(Parser, Debug)]
#[command(name = "aniso", version, about = "Orthotropic p-Laplacian barriers and solver")]
struct Cli {
    /// Worker threads for the node-parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Principal Dirichlet eigenpair of the 1D p-Laplacian on (a, b).
    Eigen1d {
        #[arg(long, value_parser = exponent)]
        p: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output directory (default: $ANISO_OUT_DIR or .).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and check the barriers, then iterate between them.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a geometric ladder of lambda values and bracket the threshold.
    LambdaScan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        /// Geometric bisections of the bracket after the ladder.
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exponent(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if p > 1.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(format!("exponent must be > 1, got {p}"))
    }
}

#[derive(Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
}

const META: Metadata = Metadata { tool: "aniso", version: env!("CARGO_PKG_VERSION") };

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    metadata: &'a Metadata,
    #[serde(flatten)]
    body: &'a T,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, error: e.into() }
    }
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

/// Regime refusals map to 3, everything else from the solver to 1.
fn classify(e: SolveError) -> Failure {
    let code = match &e {
        SolveError::Barrier(
            BarrierError::Regime { .. } | BarrierError::Unbounded { .. } | BarrierError::NoAdmissibleEpsilon { .. },
        ) => 3,
        SolveError::InvalidOption(_) => 2,
        _ => 1,
    };
    let error = match &e {
        SolveError::Barrier(BarrierError::Regime { .. }) => {
            anyhow!(e).context("the existence theory needs q < p_N (with p sorted ascending)")
        }
        _ => anyhow!(e),
    };
    Failure { code, error }
}

fn eigen1d(p: f64, a: f64, b: f64, tol: f64, out: Option<PathBuf>) -> Result<(), Failure> {
    let interval = Interval::new(a, b).map_err(|e| usage(e.into()))?;
    if !(tol > 0.0) {
        return Err(usage(anyhow!("tol must be positive")));
    }
    let e = solve_eigenpair(p, interval, tol)?;
    let dir = out_dir(out)?;
    write_json(&dir.join("eigen1d.json"), &e.to_record())?;
    write_eigen_csv(&dir.join("eigen1d.csv"), &e)?;
    let formula = (p - 1.0) * (pi_p(p)? / interval.length()).powf(p);
    println!("eta = {:.12}", e.eta());
    println!("cross-check (p-1)(pi_p/L)^p = {formula:.12}, relative gap {:.3e}", (e.eta() / formula - 1.0).abs());
    Ok(())
}

fn solve(config: PathBuf, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = Config::load(&config).map_err(usage)?;
    let lambda = cfg.lambda.ok_or_else(|| usage(anyhow!("config needs lambda")))?;
    let (prob, grid) = cfg.problem(lambda).map_err(usage)?;
    let opts = cfg.pipeline(&prob).map_err(usage)?;
    let report = solve_problem(&prob, &grid, &opts).map_err(classify)?;
    let dir = out_dir(out)?;
    write_json(&dir.join("solve_report.json"), &Tagged { metadata: &META, body: &report })?;
    write_field(&dir.join("solution.csv"), &report.solve.solution)?;
    write_field(&dir.join("lower.csv"), &report.lower)?;
    write_field(&dir.join("upper.csv"), &report.upper)?;
    println!(
        "regime {}, eps = {:.6e}, M = {}, {} outer steps, max u = {:.6e}, residual {:.3e}",
        prob.regime(),
        report.spec.eps,
        report.spec.m,
        report.solve.iterations,
        report.solve.positive_mass,
        report.solve.residual
    );
    println!(
        "checks: sub {}, super {}, order {}, monotone {}, sandwich {}, solution {}, poincare {}",
        report.lower_check.passed,
        report.upper_check.passed,
        report.barrier_order.ok,
        report.solve.monotone_ok,
        report.solve.sandwich_ok,
        report.solution_check.passed,
        report.poincare.iter().all(|p| p.ok)
    );
    if report.passed {
        Ok(())
    } else {
        Err(anyhow!("verification failed; see solve_report.json").into())
    }
}

fn scan(config: PathBuf, lo: f64, hi: f64, steps: usize, refine: usize, out: Option<PathBuf>) -> Result<(), Failure> {
    if !(lo > 0.0 && lo < hi) {
        return Err(usage(anyhow!("need 0 < lo < hi, got lo = {lo}, hi = {hi}")));
    }
    if steps < 2 {
        return Err(usage(anyhow!("need steps >= 2")));
    }
    let cfg = Config::load(&config).map_err(usage)?;
    let (prob, grid) = cfg.problem(cfg.lambda.unwrap_or(lo)).map_err(usage)?;
    if prob.regime() == Regime::OutOfTheorem {
        return Err(classify(SolveError::Barrier(BarrierError::Regime {
            regime: prob.regime(),
            q: prob.q(),
            p_max: prob.p_max(),
        })));
    }
    let mut opts = ScanOptions::new(lo, hi, steps);
    opts.refine = refine;
    opts.solve = cfg.monotone();
    let report = lambda_scan(&prob, &grid, &opts).map_err(classify)?;
    let dir = out_dir(out)?;
    write_ladder(&dir.join("ladder.csv"), &report)?;
    write_json(&dir.join("bracket.json"), &Tagged { metadata: &META, body: &report })?;
    let show = |v: Option<f64>| v.map_or("inf".to_string(), |x| format!("{x:.6}"));
    let fail = report.bracket.fail.map_or("-".to_string(), |x| format!("{x:.6}"));
    println!("bracket [{fail}, {}]", show(report.bracket.success));
    if let Some(bound) = report.nonexistence_bound {
        println!("nonexistence bound {bound}");
        if let Some(p) = report.points.iter().find(|p| p.lambda < bound && p.success) {
            return Err(anyhow!("lambda = {} below the nonexistence bound classified as a solution", p.lambda).into());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage(anyhow!("--threads must be positive")));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting the thread pool")?;
    }
    match cli.command {
        Command::Eigen1d { p, a, b, tol, out } => eigen1d(p, a, b, tol, out),
        Command::Solve { config, out } => solve(config, out),
        Command::LambdaScan { config, lo, hi, steps, refine, out } => scan(config, lo, hi, steps, refine, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if f.code == 2 {
                let _ = Cli::command().print_help();
                eprintln!();
            }
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
