use std::process::ExitCode;

use clap::Parser;

use booth_tiling::cli::{main_with, Cli};

fn main() -> ExitCode {
    match main_with(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
