//! `speed`: simulation, privacy accounting and circuit benchmarks for
//! private collaborative labeling.

mod cli;
mod commands;
mod config;
mod failure;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::config::ExperimentConfig;

fn run(cli: &Cli) -> Result<bool> {
    let config = ExperimentConfig::resolve(&cli.overrides)?;
    log::debug!("resolved config: {config:?}");
    match &cli.command {
        Command::Accountant => commands::accountant::run(&config)?,
        Command::Simulate => commands::simulate::run(&config)?,
        Command::Sweep(args) => commands::sweep::run(&config, args)?,
        Command::DistCheck(args) => return commands::dist_check::run(&config, args),
        Command::AttackDemo(args) => commands::attack::run(&config, args)?,
        Command::ArgmaxBench(args) => commands::argmax_bench::run(&config, args)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPEED_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure::exit_code(&e))
        }
    }
}
