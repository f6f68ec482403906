//! Command-line front end: `analyze`, `reconstruct`, `sweep` and `criteria`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::commands::SweepParam;
use crate::config::{parse_config, RunConfig};
use crate::error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "rotwave", version, about = "Local bifurcation of rotational water waves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate the bifurcation point and write report.json and mu_curve.csv.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the first-order wave at one or more amplitudes.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "amplitude")]
        amplitudes: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a one- or two-parameter grid and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `name:lo:hi:n` with name one of gamma, d, g, depth_frak, p0, lambda.
        #[arg(long = "param", required = true, num_args = 1)]
        params: Vec<SweepParam>,
        #[arg(long)]
        criteria_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the criteria report as JSON.
    Criteria {
        #[arg(long)]
        config: PathBuf,
    },
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::config("", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&bytes)
}

fn out_dir(config: &RunConfig, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| config.outputs.directory.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Analyze { config, out } => {
            let config = load_config(&config)?;
            commands::run_analyze(&config, &out_dir(&config, out))
        }
        Command::Reconstruct {
            config,
            amplitudes,
            out,
        } => {
            let config = load_config(&config)?;
            commands::run_reconstruct(&config, &amplitudes, &out_dir(&config, out))
        }
        Command::Sweep {
            config,
            params,
            criteria_only,
            out,
        } => {
            if params.len() > 2 {
                return Err(CliError::config("--param", "at most two parameters can be swept"));
            }
            let config = load_config(&config)?;
            commands::run_sweep(&config, &params, criteria_only, &out_dir(&config, out))
        }
        Command::Criteria { config } => {
            let config = load_config(&config)?;
            let bytes = commands::run_criteria(&config)?;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::io("stdout", e))?;
            Ok(exit::SUCCESS)
        }
    }
}

/// Machine-readable description of a failure, printed to stderr.
pub fn error_json(e: &CliError) -> serde_json::Value {
    match e {
        CliError::Config { pointer, message } => json!({
            "error": "config",
            "pointer": pointer,
            "message": message,
        }),
        CliError::Numerical(rotwave::Error::StagnationAtAmplitude {
            amplitude,
            min_jacobian,
            critical_amplitude,
        }) => json!({
            "error": "stagnation",
            "amplitude": amplitude,
            "min_jacobian": min_jacobian,
            "critical_amplitude": critical_amplitude,
            "message": e.to_string(),
        }),
        CliError::Numerical(_) => json!({ "error": "numerical", "message": e.to_string() }),
        CliError::Io { path, .. } => json!({ "error": "io", "path": path, "message": e.to_string() }),
    }
}

/// Run a parsed command and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            e.exit_code()
        }
    }
}
