mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit status: 0 success, 1 domain or validation error, 2 I/O or usage error.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Domain(clinote::Error),
}

impl From<clinote::Error> for CliError {
    fn from(e: clinote::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Domain(e)
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = config::load(cli.config.as_deref(), cli.command.name())?;
    match cli.command {
        Command::Synth(a) => commands::synth(config::merge(a, &file)?),
        Command::Preprocess(a) => commands::preprocess(config::merge(a, &file)?),
        Command::Fit(a) => commands::fit(config::merge(a, &file)?),
        Command::Predict(a) => commands::predict(config::merge(a, &file)?),
        Command::Grid(a) => commands::grid(config::merge(a, &file)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
