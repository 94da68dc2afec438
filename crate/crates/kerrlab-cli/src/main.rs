//! `kerrlab`: simulate TE-wave blow-up in Kerr slabs, sweep parameters,
//! and verify the comparison bounds against direct integration.

mod commands;
mod config;
mod report;
mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::RunArgs;

#[derive(Parser)]
#[command(
    name = "kerrlab",
    version,
    about = "Numerical laboratory for finite-coordinate blow-up in Kerr slabs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Primary output path (JSON report or CSV table); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trajectory CSV path (simulate only).
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the integrator's relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Suppress narration on stderr.
    #[arg(long)]
    quiet: bool,
}

impl From<CommonArgs> for RunArgs {
    fn from(args: CommonArgs) -> Self {
        RunArgs {
            config: args.config,
            out: args.out,
            trajectory: args.trajectory,
            workers: args.workers,
            tol: args.tol,
            quiet: args.quiet,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and report the blow-up verdict.
    Simulate(CommonArgs),
    /// Evaluate a 1- or 2-axis parameter grid into a CSV table.
    Sweep(CommonArgs),
    /// Compare the measured blow-up point against the comparison bounds.
    VerifyBound(CommonArgs),
    /// Sample the exact secant solution and its equation residual.
    Analytic(CommonArgs),
    /// Validate a configuration and check the blow-up hypotheses.
    Check(CommonArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => commands::cmd_simulate(&args.into()),
        Command::Sweep(args) => commands::cmd_sweep(&args.into()),
        Command::VerifyBound(args) => commands::cmd_verify_bound(&args.into()),
        Command::Analytic(args) => commands::cmd_analytic(&args.into()),
        Command::Check(args) => commands::cmd_check(&args.into()),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
