//! Command-line front end for the two-spin telegraph-noise library: closed
//! forms, Monte Carlo and quadrature oracles, fluctuator-ensemble
//! composition, and cross-term-corrected gate sequences.
//!
//! Exit codes: 0 on success, 1 on any validation or I/O error (the message
//! names the offending field), 2 when `reproduce-fig1` finishes but a
//! threshold check fails.

mod artifact;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::CommonArgs;

#[derive(Parser)]
#[command(name = "telegraph-exchange-cli", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump sampled telegraph trajectories as CSV
    Trajectory(CommonArgs),
    /// Tabulate the time-averaged-imbalance densities and endpoint atoms
    Pdf(CommonArgs),
    /// Sweep the scalar decay kernels over evolution time
    Superop(CommonArgs),
    /// Run one Monte Carlo ensemble and report the averaged channel
    Montecarlo(CommonArgs),
    /// Sweep closed forms against a Monte Carlo ensemble and summarize
    Compare(CommonArgs),
    /// Average a channel over a fluctuator-ensemble spectral distribution
    Compose(CommonArgs),
    /// Evaluate a gate sequence with zeroth-order cross-term correction
    Sequence(CommonArgs),
    /// Regenerate the four-rate kernel comparison and gate it on the
    /// acceptance thresholds
    #[command(name = "reproduce-fig1")]
    ReproduceFig1(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Trajectory(_) => "trajectory",
            Command::Pdf(_) => "pdf",
            Command::Superop(_) => "superop",
            Command::Montecarlo(_) => "montecarlo",
            Command::Compare(_) => "compare",
            Command::Compose(_) => "compose",
            Command::Sequence(_) => "sequence",
            Command::ReproduceFig1(_) => "reproduce-fig1",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Trajectory(a)
            | Command::Pdf(a)
            | Command::Superop(a)
            | Command::Montecarlo(a)
            | Command::Compare(a)
            | Command::Compose(a)
            | Command::Sequence(a)
            | Command::ReproduceFig1(a) => a,
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let resolved = config::resolve(cli.command.name(), cli.command.args())?;
    match cli.command {
        Command::Trajectory(_) => commands::trajectory(&resolved).map(|()| true),
        Command::Pdf(_) => commands::pdf(&resolved).map(|()| true),
        Command::Superop(_) => commands::superop(&resolved).map(|()| true),
        Command::Montecarlo(_) => commands::montecarlo(&resolved).map(|()| true),
        Command::Compare(_) => commands::compare(&resolved).map(|()| true),
        Command::Compose(_) => commands::compose(&resolved).map(|()| true),
        Command::Sequence(_) => commands::sequence(&resolved).map(|()| true),
        Command::ReproduceFig1(_) => commands::reproduce(&resolved),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version land here too; only real parse failures are
            // validation errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
