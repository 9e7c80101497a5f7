//! `agreelearn` command-line experiments.
//!
//! Every command writes its artifacts plus a `manifest.json` into `--out`.
//! Exit status is 0 on success, 1 for runtime and data errors and 2 for
//! usage errors.

mod args;
mod commands;
mod output;
#[cfg(test)]
mod tests;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::output::UsageError;

fn run(command: &Command) -> anyhow::Result<()> {
    match command {
        Command::Generate(a) => commands::generate(a),
        Command::Rank(a) => commands::rank(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Compare(a) => commands::compare(a),
        Command::Ensemble(a) => commands::ensemble(a),
        Command::Survival(a) => commands::survival(a),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
