//! `inar` — input-aware edge–cloud routing engine CLI.
//!
//! Subcommands: `extract` (request descriptor from an image and question),
//! `route` (one routing decision), `calibrate` (fit and freeze a parameter
//! bundle), `simulate` (seeded strategy comparison), `replay` (re-score a
//! correctness trace), `sweep` (bandwidth sensitivity). Exit codes: 0 on
//! success, 1 on validation errors, 2 on I/O errors.

mod commands;
mod error;
mod manifest;
mod settings;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Cli;

fn main() {
    let code = match Cli::try_parse() {
        Ok(cli) => match commands::run(cli) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code
            }
        },
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                0
            }
            _ => {
                eprint!("{e}");
                1
            }
        },
    };
    std::process::exit(code);
}
