//! `topoplan`: build graphs, score, parse, plan, evaluate and simulate.

mod commands;
mod config;
mod failure;
mod stamp;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::FileConfig;
use crate::failure::CliResult;

#[derive(Parser, Debug)]
#[command(name = "topoplan", version, about = "Landmark-following route planning over topological graphs")]
struct Cli {
    /// TOML file of default settings; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for suites and Monte-Carlo batches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic world and its trajectory log.
    GenWorld(commands::world::GenWorldArgs),
    /// Build a topological graph from a trajectory log.
    BuildGraph(commands::graph::BuildGraphArgs),
    /// Produce a landmark-by-node logit matrix.
    Score(commands::score::ScoreArgs),
    /// Extract landmarks from an instruction.
    Parse(commands::parse::ParseArgs),
    /// Plan a walk for a landmark list.
    Plan(commands::plan::PlanArgs),
    /// Evaluate planners over a query suite.
    Eval(commands::eval::EvalArgs),
    /// Execute a walk many times under per-step termination.
    Simulate(commands::simulate::SimulateArgs),
    /// Write graph (and optionally plan) geometry as GeoJSON.
    Export(commands::export::ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ParserChoice {
    Chunks,
    Remote,
}

impl std::str::FromStr for ParserChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

/// Landmarks given inline, or extracted from an instruction.
#[derive(Args, Debug, Clone)]
pub struct LandmarkSource {
    /// Landmarks separated by `;`, or `@path` to a file with one per line.
    #[arg(long, conflicts_with = "instruction")]
    landmarks: Option<String>,
    /// Free-form instruction to parse into landmarks.
    #[arg(long)]
    instruction: Option<String>,
    /// Landmark extractor used with --instruction.
    #[arg(long, value_enum)]
    parser: Option<ParserChoice>,
}

pub struct Context {
    pub config: FileConfig,
    pub jobs: Option<usize>,
}

fn run(cli: Cli) -> CliResult {
    let ctx = Context { config: FileConfig::load(cli.config.as_deref())?, jobs: cli.jobs };
    match cli.command {
        Command::GenWorld(a) => commands::world::run(&ctx, a),
        Command::BuildGraph(a) => commands::graph::run(&ctx, a),
        Command::Score(a) => commands::score::run(&ctx, a),
        Command::Parse(a) => commands::parse::run(&ctx, a),
        Command::Plan(a) => commands::plan::run(&ctx, a),
        Command::Eval(a) => commands::eval::run(&ctx, a),
        Command::Simulate(a) => commands::simulate::run(&ctx, a),
        Command::Export(a) => commands::export::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("topoplan: {f}");
            ExitCode::from(f.code())
        }
    }
}
