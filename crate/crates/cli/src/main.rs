//! `gtsfit`: fit, test and simulate generalized tempered stable return models.

mod args;
mod commands;
mod config;
mod plot;

use std::process::ExitCode;

use clap::Parser;
use gts_core::Error;

use crate::args::Cli;
use crate::config::RunConfig;

const EXIT_DATA: u8 = 2;
const EXIT_NON_CONVERGENCE: u8 = 3;
const EXIT_GRID: u8 = 4;

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::NonConvergence { .. } | Error::SingularHessian { .. }) => EXIT_NON_CONVERGENCE,
        Some(Error::Grid(_) | Error::OutOfRange { .. }) => EXIT_GRID,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result =
        RunConfig::resolve(&cli).and_then(|config| commands::run(&cli.command, &config, cli.global.out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
