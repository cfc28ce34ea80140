mod config;
mod exit;
mod simulate;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::exit::CliError;

#[derive(Debug, Parser)]
#[command(name = "grhier", version, about = "Hamiltonian hierarchies on truncated restricted Grassmannian phase spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one flow and write a CSV trajectory and a JSON report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a named property suite and report residuals against tolerances.
    Verify {
        /// core, poisson, hierarchy, oracles, extension, magri or all.
        #[arg(long)]
        suite: String,
        /// Write the report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run every point of `sweep.grid` and aggregate the results.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config } => {
            let report = simulate::cmd_simulate(&config)?;
            eprintln!("{} samples up to t = {} written to {}", report.samples, report.last_time, report.csv.display());
        }
        Command::Verify { suite, json, seed } => {
            let report = verify::run_suite(&suite, seed)?;
            match json {
                Some(path) => simulate::write_json(&path, &report)?,
                None => println!("{}", serde_json::to_string_pretty(&report).map_err(|e| CliError::failure(e.to_string()))?),
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: residual {:.3e} > {:.1e}", c.name, c.residual, c.tolerance);
            }
            if !report.pass {
                return Err(CliError::failure(format!("suite `{suite}` failed")));
            }
        }
        Command::Sweep { config, out } => {
            let s = sweep::cmd_sweep(&config, &out)?;
            eprintln!("{} ok, {} partial, {} failed; summary in {}", s.completed, s.partial, s.failed, out.join("summary.json").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
