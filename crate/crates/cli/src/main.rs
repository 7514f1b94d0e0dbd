//! `laststop` command-line tool.
//!
//! Exit codes: 0 success, 2 invalid spec or flags, 3 malformed advise input,
//! 4 resource guard (e.g. enumeration horizon too large).

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Stream(String),
    Guard(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Stream(_) => 3,
            CliError::Guard(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Stream(m) | CliError::Guard(m) => m,
        }
    }
}

impl From<laststop::Error> for CliError {
    fn from(e: laststop::Error) -> Self {
        match e {
            laststop::Error::HorizonTooLarge { .. } => CliError::Guard(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("LASTSTOP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Invalid(format!("LASTSTOP_THREADS={value} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(e.to_string()))
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), CliError> {
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("laststop: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
