pub mod eval;
pub mod export;
pub mod graph;
pub mod parse;
pub mod plan;
pub mod score;
pub mod simulate;
pub mod world;

use std::path::Path;

use topoplan::graph::parse_graph;
use topoplan::parsing::{Instruction, LandmarkParser, NounChunker, RemoteParser};
use topoplan::scoring::parse_scores;
use topoplan::{Graph, ScoreMatrix};

use crate::config::{endpoint, Service};
use crate::failure::{Classify, CliResult, Failure};
use crate::stamp::{read_input, Stamp};
use crate::{Context, LandmarkSource, ParserChoice};

pub fn load_graph(stamp: &mut Stamp, path: &Path) -> CliResult<Graph> {
    let text = read_input(stamp, "graph", path)?;
    parse_graph(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn load_scores(stamp: &mut Stamp, path: &Path) -> CliResult<ScoreMatrix> {
    let text = read_input(stamp, "scores", path)?;
    parse_scores(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn parser_choice(ctx: &Context, flag: Option<ParserChoice>) -> CliResult<ParserChoice> {
    match flag {
        Some(p) => Ok(p),
        None => match ctx.config.parser.as_deref() {
            None => Ok(ParserChoice::Chunks),
            Some(s) => s.parse().map_err(Failure::input),
        },
    }
}

pub fn make_parser(ctx: &Context, choice: ParserChoice, stamp: &mut Stamp) -> CliResult<Box<dyn LandmarkParser>> {
    stamp.setting("parser", format!("{choice:?}").to_lowercase());
    Ok(match choice {
        ParserChoice::Chunks => Box::new(NounChunker::default()),
        ParserChoice::Remote => {
            let ep = endpoint(&ctx.config, Service::Parser)?;
            stamp.input("parser_endpoint", ep.url.as_bytes());
            Box::new(RemoteParser::new(ep))
        }
    })
}

/// Resolves `--landmarks` or `--instruction` into a landmark list.
pub fn resolve_landmarks(ctx: &Context, src: &LandmarkSource, stamp: &mut Stamp) -> CliResult<Vec<String>> {
    if let Some(spec) = &src.landmarks {
        let items: Vec<String> = match spec.strip_prefix('@') {
            Some(path) => read_input(stamp, "landmarks", Path::new(path))?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect(),
            None => {
                stamp.setting("landmarks", spec);
                spec.split(';').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
            }
        };
        if items.is_empty() {
            return Err(Failure::input("landmark list is empty"));
        }
        return Ok(items);
    }
    let Some(text) = &src.instruction else {
        return Err(Failure::input("give --landmarks or --instruction"));
    };
    stamp.setting("instruction", text);
    let instruction = Instruction::new(text.clone()).input()?;
    let parser = make_parser(ctx, parser_choice(ctx, src.parser)?, stamp)?;
    let list = parser.extract(&instruction).input()?;
    Ok(list.into_inner())
}

pub fn thread_pool(ctx: &Context) -> CliResult<rayon::ThreadPool> {
    let jobs = ctx.jobs.or(ctx.config.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(Failure::input("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().internal()
}

pub fn load_world(stamp: &mut Stamp, path: &Path) -> CliResult<topoplan::sim::SyntheticWorld> {
    let text = read_input(stamp, "world", path)?;
    let world: topoplan::sim::SyntheticWorld =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if world.version != topoplan::sim::WORLD_VERSION {
        return Err(Failure::input(format!(
            "{}: unsupported world version `{}`, expected `{}`",
            path.display(),
            world.version,
            topoplan::sim::WORLD_VERSION
        )));
    }
    Ok(world)
}
