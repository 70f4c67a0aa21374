use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod output;
mod verify;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or input values.
    Invalid(String),
    Core(nmep_core::Error),
    Io(String),
    /// Verification ran but some checks failed.
    ChecksFailed(Vec<String>),
}

impl From<nmep_core::Error> for CliError {
    fn from(e: nmep_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::ChecksFailed(_) => 3,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::ChecksFailed(names) => write!(f, "failed checks: {}", names.join(", ")),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("NMEP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("NMEP_THREADS = {value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Eigen(a) => commands::eigen(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Revivals(a) => commands::revivals(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::EpMatrix(a) => commands::ep_matrix(&a),
        Command::Verify(a) => verify::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nmep: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
