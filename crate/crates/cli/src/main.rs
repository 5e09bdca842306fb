mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Why a run stopped; each maps to a fixed exit status.
#[derive(Debug)]
pub enum Failure {
    Core(misobc_core::Error),
    /// An opt-in `--assert-*` check failed.
    Assertion(String),
}

impl From<misobc_core::Error> for Failure {
    fn from(e: misobc_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        use misobc_core::Error;
        match self {
            Failure::Core(Error::Usage(_) | Error::Contract(_)) => 2,
            Failure::Core(Error::Domain(_)) => 3,
            Failure::Core(Error::Io(_) | Error::Json(_)) => 1,
            Failure::Assertion(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Assertion(msg) => write!(f, "assertion failed: {msg}"),
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Capacity(a) => commands::capacity(a),
        Command::Rq(a) => commands::rq(a),
        Command::Region(a) => commands::region(a),
        Command::Gap(a) => commands::gap(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Rd(a) => commands::rd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("misobc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
