//! `utm`: batch front end for the half-plane solver. Three commands: `run` a
//! TOML-configured scenario, `report` on a produced manifest, and `selftest`
//! for the built-in desk-scale sweep. Exit codes: 2 config error, 3 solver
//! error, 4 threshold failure in audits.

mod artifacts;
mod config;
mod profiles;
mod report;
mod scenarios;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Solver(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "utm", version, about = "half-plane Schrödinger solver front end")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the scenario described by a TOML config file
    Run { config: PathBuf },
    /// Summarize a run from its manifest
    Report { manifest: PathBuf },
    /// Run every scenario once at desk scale with fixed thresholds
    Selftest {
        /// output directory for the sweep
        #[arg(long, default_value = "utm-selftest")]
        out: PathBuf,
        /// seed shared by all randomized scenarios
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn cap_workers() {
    if let Ok(value) = std::env::var("UTM_WORKERS") {
        if let Ok(n) = value.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", config.display()))
            })?;
            let run = config::RunConfig::parse(&text)?;
            let manifest = scenarios::run_scenario(&run)?;
            println!(
                "run {}: {}  ({} artifacts in {})",
                manifest.scenario,
                if manifest.pass { "PASS" } else { "FAIL" },
                manifest.files.len(),
                run.output.display()
            );
            for (key, value) in &manifest.summary {
                println!("  {key:<28} {value:.6e}");
            }
            Ok(manifest.pass)
        }
        Command::Report { manifest } => {
            let text = report::emit_report(&manifest)?;
            print!("{text}");
            Ok(true)
        }
        Command::Selftest { out, seed } => selftest::run_selftest(&out, seed),
    }
}

fn main() -> ExitCode {
    cap_workers();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
