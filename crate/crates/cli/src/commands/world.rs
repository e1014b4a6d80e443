use std::path::PathBuf;

use anyhow::Context as _;
use clap::{Args, ValueEnum};
use topoplan::sim::{generate_benchmark, generate_world, render_trajectory_log, BenchmarkSpec, WorldSpec};

use crate::config;
use crate::failure::{Classify, CliResult};
use crate::stamp::{to_json, write_output, Stamp};
use crate::Context;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Preset {
    Small,
    Large,
}

#[derive(Args, Debug)]
pub struct GenWorldArgs {
    /// Benchmark preset; also writes a query suite.
    #[arg(long, value_enum, conflicts_with_all = ["rows", "cols"])]
    preset: Option<Preset>,
    #[arg(long, default_value_t = 5)]
    rows: usize,
    #[arg(long, default_value_t = 5)]
    cols: usize,
    #[arg(long = "landmark-count", default_value_t = 4)]
    landmark_count: usize,
    #[arg(long, default_value_t = 1)]
    placements: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for world.json, trajectories.csv (and suite.json); created if missing.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(ctx: &Context, a: GenWorldArgs) -> CliResult {
    let seed = config::seed(a.seed, &ctx.config, "gen-world")?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display())).input()?;
    let mut stamp = Stamp::new("gen-world");
    stamp.setting("seed", seed);

    let (world, records, suite) = match a.preset {
        Some(p) => {
            let spec = match p {
                Preset::Small => BenchmarkSpec::small(seed),
                Preset::Large => BenchmarkSpec::large(seed),
            };
            stamp.setting("preset", &spec.name);
            let b = generate_benchmark(&spec).input()?;
            (b.world, b.records, Some(b.suite))
        }
        None => {
            let spec =
                WorldSpec { placements_per_landmark: a.placements, ..WorldSpec::grid(a.rows, a.cols, a.landmark_count, seed) };
            stamp.setting("spec", &spec);
            let (w, r) = generate_world(&spec).input()?;
            (w, r, None)
        }
    };

    let mut doc = serde_json::to_value(&world).internal()?;
    doc["stamp"] = serde_json::to_value(&stamp).internal()?;
    write_output(&a.out.join("world.json"), &to_json(&doc))?;
    write_output(&a.out.join("trajectories.csv"), &(stamp.comment() + &render_trajectory_log(&records)))?;
    if let Some(suite) = &suite {
        let mut doc = serde_json::to_value(suite).internal()?;
        doc["stamp"] = serde_json::to_value(&stamp).internal()?;
        write_output(&a.out.join("suite.json"), &to_json(&doc))?;
    }
    println!(
        "world: {} nodes, {} edges, {} landmarks, {} trajectory records{}",
        world.nodes.len(),
        world.edges.len(),
        world.placements.len(),
        records.len(),
        suite.map_or(String::new(), |s| format!(", {} queries", s.cases.len()))
    );
    Ok(())
}
