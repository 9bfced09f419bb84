mod commands;
mod manifest;
mod opts;
mod svg;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use opts::{Cli, Command};

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SCREENPATH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("SCREENPATH_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(mut cli: Cli) -> Result<()> {
    configure_threads()?;
    let name = cli.command.name();
    let opts = std::mem::take(cli.command.opts_mut()).resolve()?;
    match cli.command {
        Command::Criteria(_) => commands::criteria(name, &opts),
        Command::Gds(_) => commands::gds(name, &opts),
        Command::Phi(_) => commands::phi(name, &opts),
        Command::PhiSim(_) => commands::phi_sim(name, &opts),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
