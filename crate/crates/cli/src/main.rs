use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(stochdom::run(stochdom::Cli::parse()))
}
