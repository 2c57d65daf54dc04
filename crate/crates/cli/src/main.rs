//! Batch entry point: reproducible solve/verify/relax/convergence runs with
//! machine-readable reports. Exit codes: 0 success, 1 numerical failure,
//! 2 configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CmdError;
use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(
    name = "mvpde",
    about = "Reaction-diffusion solves, measure-valued residual suites, and moment relaxations"
)]
struct Cli {
    /// Path to the TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides [output] dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suite field override: dirac | counterexample.
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Single relaxation degree override.
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Grid override as NTxNX, e.g. 64x64.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Scheme override: crank-nicolson | implicit-euler.
    #[arg(long, global = true)]
    scheme: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem and write the solution artifacts.
    Solve,
    /// Run the residual suites and the concentration certificate.
    Verify,
    /// Assemble and solve the moment relaxations; write the bounds table.
    Relax,
    /// Solve on three nested grids and fit the observed residual order.
    ConvergenceStudy,
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("config-read-error", format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.output.dir = out.display().to_string();
    }
    if let Some(suite) = &cli.suite {
        config.suite.field = suite.clone();
    }
    if let Some(d) = cli.degree {
        config.relax.degrees = vec![d];
    }
    if let Some(grid) = &cli.grid {
        let (nt, nx) = grid
            .split_once('x')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| ConfigError::new("invalid-grid-override", grid))?;
        config.grid.nt = nt;
        config.grid.nx = nx;
    }
    if let Some(scheme) = &cli.scheme {
        config.grid.scheme = scheme.clone();
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            let err = CmdError::Config(e);
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let out = PathBuf::from(&config.output.dir);
    let result = match cli.command {
        Command::Solve => commands::cmd_solve(&config, &out),
        Command::Verify => commands::cmd_verify(&config, &out),
        Command::Relax => commands::cmd_relax(&config, &out),
        Command::ConvergenceStudy => commands::cmd_convergence_study(&config, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
