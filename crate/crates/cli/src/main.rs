//! `fracstep`: solve, cross-check and verify variable-order subdiffusion problems.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fracstep_core::Error;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Core(Error::Domain(_)) => "domain",
            CliError::Core(Error::Hypothesis(_)) => "hypothesis",
            CliError::Core(Error::Accuracy { .. }) => "accuracy",
            CliError::Core(Error::Numeric(_)) => "numeric",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Core(Error::Accuracy { .. }) | CliError::Core(Error::Numeric(_)) => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fracstep",
    version,
    about = "Spectral solver for subdiffusion with a piecewise-constant order"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Single worker regardless of --threads.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral solve: solution.csv, modes.csv, meta.json.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// L1 reference solve, per mode or on the full finite-difference grid.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, conflicts_with = "full")]
        modes: bool,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        spatial_points: Option<usize>,
    },
    /// Spectral vs L1 discrepancies over a sequence of steps.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Regularity report and rate-fit samples.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Batch Mittag-Leffler evaluation from an `alpha,beta,z` CSV.
    MlEval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<config::RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    config::parse(&text)
}

fn execute(command: Command) -> Result<(), CliError> {
    let start = Instant::now();
    let (name, common) = match &command {
        Command::Solve { common } => ("solve", common),
        Command::Oracle { common, .. } => ("oracle", common),
        Command::Compare { common } => ("compare", common),
        Command::Verify { common } => ("verify", common),
        Command::MlEval { common, .. } => ("ml-eval", common),
    };
    let common = common.clone();
    let mut cfg = load(&common.config)?;
    let threads = if common.deterministic { 1 } else { common.threads.max(1) };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    log::info!("{name} with {threads} thread(s)");

    let run = match command {
        Command::Solve { .. } => commands::solve(&cfg)?,
        Command::Oracle {
            tau,
            modes,
            full,
            spatial_points,
            ..
        } => {
            if let Some(t) = tau {
                cfg.run.tau = t;
            }
            if full {
                cfg.run.oracle_full = true;
            } else if modes {
                cfg.run.oracle_full = false;
            }
            if let Some(p) = spatial_points {
                cfg.run.oracle_spatial_points = p;
            }
            commands::oracle(&cfg)?
        }
        Command::Compare { .. } => commands::compare(&cfg)?,
        Command::Verify { .. } => commands::verify(&cfg)?,
        Command::MlEval { input, .. } => {
            let base = common.config.parent().unwrap_or(Path::new("."));
            commands::ml_eval(&cfg, input.as_deref(), base)?
        }
    };

    let mut artifacts = run.artifacts;
    let timings: serde_json::Map<String, serde_json::Value> =
        run.timings.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let meta = json!({
        "command": name,
        "config": cfg,
        "versions": {
            "fracstep": env!("CARGO_PKG_VERSION"),
            "fracstep-core": fracstep_core::VERSION,
        },
        "threads": threads,
        "deterministic": threads == 1,
        "timings": {
            "stages": timings,
            "total_s": start.elapsed().as_secs_f64(),
        },
    });
    artifacts.add_json(&cfg.outputs.meta, &meta);
    let written = artifacts.commit(&common.out)?;
    log::info!("wrote {}", written.join(", "));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRACSTEP_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = json!({"error": {"kind": e.kind(), "message": e.message()}, "exit_code": e.code()});
            eprintln!("{body}");
            ExitCode::from(e.code())
        }
    }
}
