//! `hypocert`: command-line front end for hypocoercivity certificates of
//! linearized BGK on the torus.
//!
//! Every subcommand writes a single artifact (CSV or JSON) that starts with
//! the effective run configuration, so outputs are self-describing and
//! reproducible. Exit status is 0 on success, 2 when a verification step
//! fails and 1 on usage or runtime errors.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Result of a subcommand that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// All checks passed.
    Ok,
    /// The artifact was written but a verification step failed.
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
