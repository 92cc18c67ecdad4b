//! Command-line runner for the `qbc_core` experiments.
//!
//! Each subcommand reads a flat TOML config, runs one experiment family and
//! writes CSV or a JSON envelope stamped with the config hash and seed.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::{CliError, CliResult};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "qbc", version, about = "Bit-commitment protocol experiments")]
pub struct Cli {
    /// Flat TOML config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides the config)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Trials per experiment (overrides the config)
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Worker threads for parallel trials
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Subcommand)]
pub enum Command {
    /// One commit session followed by an unveil
    Run,
    /// Binding, concealing and efficiency over a parameter grid
    Sweep,
    /// Detection probabilities of the intercept-resend strategies
    Strategies,
    /// Composite-system checks for small codes
    Nogo,
    /// Mode-probing attack and FBS transfer curves
    Counterfactual,
    /// Run the invariant suite
    Verify,
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let mut cfg = config::Config::load(cli.config.as_deref())?;
    match cli.seed {
        Some(seed) => cfg.set("seed", seed.into()),
        None if !cfg.contains("seed") => cfg.set("seed", 0u64.into()),
        None => {}
    }
    if let Some(trials) = cli.trials {
        cfg.set("trials", trials.into());
    }
    let sink = |default| output::Sink::new(&cfg, cli.format, cli.out.clone(), default);
    match cli.command {
        Command::Run => commands::run::execute(&cfg, &sink(Format::Json)?),
        Command::Sweep => commands::sweep::execute(&cfg, &sink(Format::Csv)?),
        Command::Strategies => commands::strategies::execute(&cfg, &sink(Format::Csv)?),
        Command::Nogo => commands::nogo::execute(&cfg, &sink(Format::Json)?),
        Command::Counterfactual => commands::counterfactual::execute(&cfg, &sink(Format::Csv)?),
        Command::Verify => commands::verify::execute(&cfg, &sink(Format::Json)?),
    }
}
