mod args;
mod commands;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use crate::args::{Cli, Command};
use crate::output::{error_record, Sink};

/// Caps the worker pool when set.
const THREADS_ENV: &str = "DTA_OPT_THREADS";

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer (found '{value}')"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let sink = Sink {
        format: cli.format,
        path: cli.output,
    };
    match &cli.command {
        Command::VerifyPrp(a) => commands::verify_prp(a, &sink),
        Command::Compare(a) => commands::compare(a, &sink),
        Command::Bench(a) => commands::bench(a, &sink),
        Command::Train(a) => commands::train(a, &sink),
        Command::Predict(a) => commands::predict(a, &sink),
        Command::Generate(a) => commands::generate(a, &sink),
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|e| {
                matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe)
            })
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            let record = serde_json::json!({
                "schema_version": dtaopt_core::SCHEMA_VERSION,
                "error": { "kind": "usage", "message": err.kind().to_string(), "detail": err.to_string() },
            });
            eprintln!("{record}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed downstream pipe (`| head`) is not a failure.
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_record(&err));
            ExitCode::FAILURE
        }
    }
}
