use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use impulsive_logistic::experiments::{
    self, parse_config, preset, run_periodic, run_scenario, ExperimentError, Scenario, PRESET_NAMES,
};
use impulsive_logistic::index::compute_index;

#[derive(Parser)]
#[command(name = "implog", version, about = "Impulsive logistic population on an evolving domain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the reproduction index report.
    R0 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Simulate and write field, period and summary artifacts.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Iterate the period map to a periodic orbit (or extinction).
    Periodic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one parameter and locate R0 = 1 crossings.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also simulate each point and classify it.
        #[arg(long)]
        simulate: bool,
    },
    /// Run one of the built-in example scenarios.
    Reproduce {
        #[arg(long, value_parser = PRESET_NAMES)]
        example: String,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Parse(String),
    Run(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(c) => Failure::Parse(c.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::R0 { config } => {
            let s = load(&config)?;
            let report = compute_index(&s.params, &s.rho, &s.pulse).map_err(|e| Failure::Run(e.to_string()))?;
            print!("{}", report.to_keyed_text());
        }
        Command::Simulate { config, out } => {
            let record = run_scenario(&load(&config)?, Some(&out))?;
            print!("{}", record.to_keyed_text());
        }
        Command::Periodic { config, out } => {
            let record = run_periodic(&load(&config)?, Some(&out))?;
            print!("{}", record.to_keyed_text());
        }
        Command::Sweep { config, param, from, to, points, out, simulate } => {
            let table = experiments::sweep(&load(&config)?, &param, from, to, points, simulate)?;
            table.write(&out)?;
            print!("{}", table.crossings_text());
        }
        Command::Reproduce { example, out } => {
            let s = preset(&example).ok_or_else(|| Failure::Parse(format!("unknown example {example}")))?;
            let record = run_scenario(&s, Some(&out))?;
            print!("{}", record.to_keyed_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
