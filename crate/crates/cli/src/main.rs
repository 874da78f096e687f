// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! `daepl`: analyze linear differential-algebraic pencils (E, A), solve
//! their mild formulations by two independent routes, and reproduce the
//! periodic transport example.
//!
//! Exit codes: 0 on success, 1 for input problems (unreadable or
//! ill-formed files, bad flags), 2 when the analysis refuses to certify
//! (no generator, inconsistent initial value, contour failure).

mod mm;
mod report;
mod run;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "daepl",
    version,
    about = "Operator pencil analysis for differential-algebraic systems",
    long_about = "Analyzes pencils (E, A) given as Matrix Market files: index \
                  estimation from resolvent growth, invariant-subspace chains, \
                  consistent-initial-value spaces, generator certification, and \
                  trajectories by semigroup evolution or Laplace inversion.\n\n\
                  The pipelines are single-threaded; DAEPL_THREADS, when set, \
                  must be a positive integer and caps worker threads (a cap of \
                  1 is always honored)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a pencil and print a JSON report
    Analyze(AnalyzeArgs),
    /// Solve the mild formulation and write trace CSVs
    Solve(SolveArgs),
    /// Run the built-in periodic transport example
    Example(ExampleArgs),
    /// Check the resolvent and generator identities on a pencil
    Check(CheckArgs),
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Matrix Market file holding E
    pub e: PathBuf,
    /// Matrix Market file holding A
    pub a: PathBuf,
    /// Abscissa bounding the index-fit grid from the left
    #[arg(long, default_value_t = 1.0)]
    pub rho0: f64,
    /// Decades spanned by the index-fit grid
    #[arg(long, default_value_t = 4)]
    pub grid_decades: u32,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Semigroup,
    Laplace,
    Both,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Matrix Market file holding E
    pub e: PathBuf,
    /// Matrix Market file holding A
    pub a: PathBuf,
    /// Matrix Market file holding the initial value (one column)
    pub x0: PathBuf,
    /// Final time of the uniform grid
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Step of the uniform grid; must divide t-end evenly
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    /// Construction route for the trajectory
    #[arg(long, value_enum, default_value_t = Route::Semigroup)]
    pub route: Route,
    /// Abscissa bounding the index-fit grid from the left
    #[arg(long, default_value_t = 1.0)]
    pub rho0: f64,
    /// Consistency tolerance for the initial value (0 for the default)
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// Decades spanned by the index-fit grid
    #[arg(long, default_value_t = 4)]
    pub grid_decades: u32,
    /// Contour abscissa override for the laplace route
    #[arg(long)]
    pub contour_rho: Option<f64>,
    /// Contour truncation override for the laplace route
    #[arg(long)]
    pub contour_omega: Option<f64>,
    /// Contour node-count override for the laplace route
    #[arg(long)]
    pub contour_nodes: Option<usize>,
    /// Trace destination; `--route both` appends the route name to the stem
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExampleArgs {
    /// Number of grid cells (even, at least 8)
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Abscissa bounding the index-fit grid from the left
    #[arg(long, default_value_t = 1.0)]
    pub rho0: f64,
    /// Decades spanned by the index-fit grid
    #[arg(long, default_value_t = 4)]
    pub grid_decades: u32,
    /// Write a CSV of the kernel witness and its chain-space projection
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Matrix Market file holding E
    pub e: PathBuf,
    /// Matrix Market file holding A
    pub a: PathBuf,
    /// Abscissa bounding the index-fit grid from the left
    #[arg(long, default_value_t = 1.0)]
    pub rho0: f64,
    /// Decades spanned by the index-fit grid
    #[arg(long, default_value_t = 4)]
    pub grid_decades: u32,
    /// Seed for the sampled identity checks
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// DAEPL_THREADS caps internal parallelism. The pipelines are serial, so
/// any positive cap is honored as-is; the variable is still validated so
/// misconfigured environments fail loudly.
fn thread_cap() -> Result<(), run::Failure> {
    match std::env::var("DAEPL_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(t) if t >= 1 => Ok(()),
            _ => Err(run::Failure {
                code: 1,
                message: format!("DAEPL_THREADS must be a positive integer, got '{v}'"),
            }),
        },
        Err(_) => Ok(()),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };

    let result = thread_cap().and_then(|()| match &cli.command {
        Command::Analyze(args) => run::run_analyze(args),
        Command::Solve(args) => run::run_solve(args),
        Command::Example(args) => run::run_example(args),
        Command::Check(args) => run::run_check(args),
    });

    if let Err(failure) = result {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}
