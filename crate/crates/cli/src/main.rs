mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Settings};

/// Exit status 2 for bad input, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Internal(anyhow::Error),
}

impl From<deltashock::Error> for CliError {
    fn from(err: deltashock::Error) -> Self {
        use deltashock::Error::*;
        match err {
            NonPositiveDensity(_)
            | NonFinite { .. }
            | InvalidEps(_)
            | InvariantsOutOfRange { .. }
            | InvalidConfig(_)
            | Precondition(_)
            | NotFlat { .. } => CliError::Validation(err.to_string()),
            _ => CliError::Internal(err.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Internal(err.into())
    }
}

type Handler = fn(&Settings) -> Result<(), CliError>;

fn dispatch(command: &Command) -> Result<(), CliError> {
    let (opts, run): (_, Handler) = match command {
        Command::Solve(o) => (o, commands::solve),
        Command::LimitTargets(o) => (o, commands::limit_targets),
        Command::Sweep(o) => (o, commands::sweep),
        Command::Simulate(o) => (o, commands::simulate),
        Command::Compare(o) => (o, commands::compare),
        Command::Report(o) => (o, commands::report),
    };
    let settings = Settings::resolve(opts)?;
    if let Some(dir) = &settings.out {
        std::fs::create_dir_all(dir)?;
    }
    run(&settings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(err))
            if err.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(CliError::Internal(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
