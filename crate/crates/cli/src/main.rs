//! `cond-hardy run config.json`: solves the configured problem and writes
//! CSV fields, traces and a JSON manifest into the output directory.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod io;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

/// Environment variable overriding the thread count of a run.
const THREADS_VAR: &str = "CONDHARDY_THREADS";

#[derive(Parser)]
#[command(
    name = "cond-hardy",
    version,
    about = "Conductivity boundary problems through generalized Hardy spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory, overriding the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    Check { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg = RunConfig::from_json(&text)?;
    let base = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
    cfg.rebase(&base);
    Ok(cfg)
}

fn thread_count(cfg: &RunConfig) -> Result<Option<usize>, String> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_VAR} must be a positive integer, got {v:?}"
            )),
        },
        Err(_) => match cfg.threads {
            Some(0) => Err("threads must be positive".into()),
            t => Ok(t),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (path, output) = match cli.command {
        Command::Run { config, output } => (config, output),
        Command::Check { config } => {
            return match load(&config) {
                Ok(_) => {
                    println!("{}: ok", config.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(4)
                }
            };
        }
    };
    let mut cfg = match load(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    if let Some(o) = output {
        cfg.output = o;
    }
    let threads = match thread_count(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let code = run::run(&cfg, &path, rayon::current_num_threads());
    ExitCode::from(code as u8)
}
