use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod model;
mod plot;

use commands::Ctx;
use config::RunConfig;

/// Lighting schedule planner for indoor lettuce: image segmentation, growth-model
/// training, schedule optimization and simulation.
#[derive(Debug, Parser)]
#[command(name = "growlight", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every random stream the command uses.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: ./out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure per-pot leaf area in a directory of top-down images.
    Segment(commands::segment::SegmentArgs),
    /// Turn experiment run files into train/test growth samples.
    BuildDataset(commands::data::BuildDatasetArgs),
    /// Fit the linear and neural growth models and report their errors.
    Train(commands::train::TrainArgs),
    /// Tabulate hourly growth over the red × blue PPFD grid.
    Sensitivity(commands::sensitivity::SensitivityArgs),
    /// Search for a profitable lighting schedule with the genetic algorithm.
    Optimize(commands::optimize::OptimizeArgs),
    /// Roll a schedule through a growth model and compare it with the baseline.
    Simulate(commands::simulate::SimulateArgs),
    /// Compare two simulation summaries.
    Compare(commands::simulate::CompareArgs),
}

/// A problem with the user's input: bad flags, files or data. Exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn is_input_error(err: &anyhow::Error) -> bool {
    use growlight::Error as E;
    if err.downcast_ref::<InputError>().is_some() {
        return true;
    }
    err.chain().any(|cause| {
        if let Some(e) = cause.downcast_ref::<E>() {
            return !matches!(e, E::Fit(_) | E::Training { .. } | E::Metrics(_) | E::Simulation { .. } | E::Fitness(_));
        }
        cause.is::<std::io::Error>()
            || cause.is::<serde_json::Error>()
            || cause.is::<toml::de::Error>()
            || cause.is::<csv::Error>()
            || cause.is::<image::ImageError>()
    })
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.ga.seed = cfg.seed;
    cfg.training.seed = cfg.seed;
    cfg.segment.kmeans.seed = cfg.seed;
    let out = cli.out.or_else(|| cfg.paths.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Ctx { cfg, out };
    match cli.command {
        Command::Segment(a) => commands::segment::run(&ctx, a),
        Command::BuildDataset(a) => commands::data::run(&ctx, a),
        Command::Train(a) => commands::train::run(&ctx, a),
        Command::Sensitivity(a) => commands::sensitivity::run(&ctx, a),
        Command::Optimize(a) => commands::optimize::run(&ctx, a),
        Command::Simulate(a) => commands::simulate::run(&ctx, a),
        Command::Compare(a) => commands::simulate::compare(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_input_error(&err) { 2 } else { 1 })
        }
    }
}
