use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use topoplan::graph::NodeId;
use topoplan::planner::traversal_probability;
use topoplan::sim::{execute_walk, ExecutionTrace, Outcome};

use super::{load_graph, thread_pool};
use crate::config::{self, pick};
use crate::failure::{Classify, CliResult, Failure};
use crate::stamp::{check_output, read_input, to_json, write_output, Stamp};
use crate::Context;

pub const SIMULATION_VERSION: &str = "simulation/1";

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Plan file supplying the walk (and gamma, unless given).
    #[arg(long, conflicts_with = "walk")]
    plan: Option<PathBuf>,
    /// Walk as comma-separated node ids.
    #[arg(long, value_delimiter = ',')]
    walk: Option<Vec<NodeId>>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Executions; run k uses seed + k.
    #[arg(long)]
    runs: Option<u64>,
    /// Summary file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Per-run trace CSV.
    #[arg(long)]
    traces: Option<PathBuf>,
}

#[derive(Serialize)]
struct Summary<'a> {
    version: &'static str,
    stamp: &'a Stamp,
    walk: &'a [NodeId],
    gamma: f64,
    seed: u64,
    runs: u64,
    completed: u64,
    empirical_rate: f64,
    analytic_rate: f64,
    /// Three binomial standard errors around the analytic rate.
    three_sigma: f64,
    within_three_sigma: bool,
}

pub fn run(ctx: &Context, a: SimulateArgs) -> CliResult {
    check_output(&a.out)?;
    if let Some(t) = &a.traces {
        check_output(t)?;
    }
    let seed = config::seed(a.seed, &ctx.config, "simulate")?;
    let runs = pick(a.runs, ctx.config.runs, 10_000);
    if runs == 0 {
        return Err(Failure::input("--runs must be at least 1"));
    }
    let mut stamp = Stamp::new("simulate");
    let graph = load_graph(&mut stamp, &a.graph)?;
    let (walk, plan_gamma) = match (&a.plan, a.walk) {
        (Some(p), _) => {
            let text = read_input(&mut stamp, "plan", p)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            let walk: Vec<NodeId> =
                serde_json::from_value(v["walk"].clone()).map_err(|e| Failure::input(format!("{}: walk: {e}", p.display())))?;
            (walk, v["gamma"].as_f64())
        }
        (None, Some(w)) => (w, None),
        (None, None) => return Err(Failure::input("give --plan or --walk")),
    };
    let gamma = config::gamma(a.gamma.or(plan_gamma), &ctx.config)?;
    stamp.setting("gamma", gamma);
    stamp.setting("seed", seed);
    stamp.setting("runs", runs);

    execute_walk(&graph, &walk, gamma, seed).input()?;
    let traces: Vec<ExecutionTrace> = thread_pool(ctx)?.install(|| {
        (0..runs)
            .into_par_iter()
            .map(|k| execute_walk(&graph, &walk, gamma, seed.wrapping_add(k)).expect("walk validated above"))
            .collect()
    });
    let completed = traces.iter().filter(|t| t.completed()).count() as u64;
    let analytic = traversal_probability(&graph, &walk, gamma).input()?;
    let empirical = completed as f64 / runs as f64;
    let three_sigma = 3.0 * (analytic * (1.0 - analytic) / runs as f64).sqrt();
    let summary = Summary {
        version: SIMULATION_VERSION,
        stamp: &stamp,
        walk: &walk,
        gamma,
        seed,
        runs,
        completed,
        empirical_rate: empirical,
        analytic_rate: analytic,
        three_sigma,
        within_three_sigma: (empirical - analytic).abs() <= three_sigma,
    };
    write_output(&a.out, &to_json(&summary))?;
    if let Some(path) = &a.traces {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["run", "seed", "outcome", "terminated_edge", "realized_nodes"]).internal()?;
        for (k, t) in traces.iter().enumerate() {
            let (outcome, edge) = match t.outcome {
                Outcome::Completed => ("completed", String::new()),
                Outcome::Terminated { edge } => ("terminated", edge.to_string()),
            };
            w.write_record([k.to_string(), t.seed.to_string(), outcome.to_string(), edge, t.realized.len().to_string()])
                .internal()?;
        }
        let body = String::from_utf8(w.into_inner().internal()?).internal()?;
        write_output(path, &(stamp.comment() + &body))?;
    }
    println!("completed {completed}/{runs}: empirical {empirical:.4}, analytic {analytic:.4} (3 sigma = {three_sigma:.4})");
    Ok(())
}
