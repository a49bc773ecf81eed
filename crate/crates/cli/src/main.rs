//! `sobolev`: batch experiments with Sobolev orthogonal polynomial
//! expansions.
//!
//! Exit codes: 0 when every check passes or is inconclusive, 1 when some
//! check fails, 2 for configuration errors, 3 for numerical failures.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sobolev_core::gegenbauer::GegenbauerSobolevParams;
use sobolev_core::report::Verdict;

use config::{ExperimentConfig, Overrides};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "sobolev",
    version,
    about = "Sobolev orthogonal polynomial experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Connection coefficients, recurrence band and residual summary.
    Basis(Common),
    /// Fourier-Sobolev coefficients and partial sums.
    Expand(Common),
    /// Multiplier partial sums.
    Transform(Common),
    /// Hypothesis checks and convergence probes.
    Verify(Common),
    /// Sobolev W^p norm of the configured function.
    Norm(Common),
    /// Emit a Gegenbauer-Sobolev space block.
    Preset(PresetArgs),
}

#[derive(Args)]
struct Common {
    /// JSON experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    function: Option<String>,
    /// NAME[:PARAM], e.g. `log`, `fejer:16`, `power:0.5`.
    #[arg(long)]
    multiplier: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// NAME=VALUE tolerance override; repeatable.
    #[arg(long)]
    tol: Vec<String>,
}

#[derive(Args)]
struct PresetArgs {
    #[arg(long)]
    alpha: f64,
    /// Weight of the value terms at the endpoints.
    #[arg(long = "M", default_value_t = 0.0)]
    m: f64,
    /// Weight of the derivative terms at the endpoints.
    #[arg(long = "N", default_value_t = 0.0)]
    n: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn experiment(c: Common) -> Result<(config::Experiment, bool), CliError> {
    let cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let on_region = c.delta.is_some();
    let e = cfg.resolve(Overrides {
        nmax: c.nmax,
        function: c.function,
        multiplier: c.multiplier,
        p: c.p,
        delta: c.delta,
        out: c.out,
        tol: c.tol,
    })?;
    for w in &e.warnings {
        eprintln!("warning: {w}");
    }
    Ok((e, on_region))
}

fn run(cli: Cli) -> Result<Verdict, CliError> {
    match cli.command {
        Command::Basis(c) => commands::basis(&experiment(c)?.0),
        Command::Expand(c) => commands::expand(&experiment(c)?.0),
        Command::Transform(c) => commands::transform(&experiment(c)?.0),
        Command::Verify(c) => commands::verify(&experiment(c)?.0),
        Command::Norm(c) => {
            let (e, on_region) = experiment(c)?;
            commands::norm(&e, on_region)
        }
        Command::Preset(a) => {
            let params = GegenbauerSobolevParams::new(a.alpha, a.m, a.n)?;
            commands::preset(&params, &a.out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Verdict::Fails) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
