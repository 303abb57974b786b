mod args;
mod cmd;
mod config;
mod error;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::CliConfig;

fn run(cli: Cli) -> error::Result<()> {
    let mut cfg = CliConfig::load(cli.config.as_deref())?;
    cfg.jobs = cli.jobs.or(cfg.jobs);
    cfg.validate()?;
    match cli.command {
        Command::Linearize(a) => cmd::linearize::run(a, &cfg),
        Command::Annotate(a) => cmd::annotate::run(a, &cfg),
        Command::Bench(a) => cmd::bench::run(a, &cfg),
        Command::Stats(a) => cmd::stats::run(a, &cfg),
        Command::Serve(a) => cmd::serve::run(a, &cfg),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on its own usage errors
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
