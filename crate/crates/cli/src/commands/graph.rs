use std::path::PathBuf;

use clap::Args;
use topoplan::graph::{build_graph, reduce_graph, render_graph, spatial_distance, GraphBuildParams, ObservationNode};
use topoplan::sim::{parse_trajectory_log, SyntheticWorld, UNREACHABLE_STEPS};
use topoplan::Graph;

use super::load_world;
use crate::config::pick;
use crate::failure::{Classify, CliResult, Failure};
use crate::stamp::{check_output, read_input, write_output, Stamp};
use crate::Context;

#[derive(Args, Debug)]
pub struct BuildGraphArgs {
    /// Trajectory log (CSV: trajectory_id,timestamp,x,y,node_id).
    #[arg(long)]
    trajectories: PathBuf,
    /// World file whose hop distances serve as the traversal estimator.
    #[arg(long)]
    world: Option<PathBuf>,
    /// Without a world file, estimate traversal steps as meters / this.
    #[arg(long, conflicts_with = "world")]
    meters_per_step: Option<f64>,
    /// Timestamp threshold in seconds.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Traversal-distance threshold in time-steps.
    #[arg(long)]
    tau: Option<f64>,
    /// Spatial threshold in meters.
    #[arg(long)]
    eta: Option<f64>,
    /// Reduction slack in time-steps.
    #[arg(long)]
    slack: Option<f64>,
    /// Keep every edge the predicate admits.
    #[arg(long)]
    no_reduce: bool,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(ctx: &Context, a: BuildGraphArgs) -> CliResult {
    check_output(&a.out)?;
    let c = &ctx.config;
    let d = GraphBuildParams::default();
    let params = GraphBuildParams {
        epsilon: pick(a.epsilon, c.epsilon, d.epsilon),
        tau: pick(a.tau, c.tau, d.tau),
        eta: pick(a.eta, c.eta, d.eta),
        reduction_slack: pick(a.slack, c.slack, d.reduction_slack),
        reduce: false,
        ..d
    };
    params.validate().input()?;

    let mut stamp = Stamp::new("build-graph");
    let text = read_input(&mut stamp, "trajectories", &a.trajectories)?;
    let records = parse_trajectory_log(&text).map_err(|e| Failure::input(format!("{}: {e}", a.trajectories.display())))?;
    let observations = SyntheticWorld::observations(&records);
    for (key, v) in [("epsilon", params.epsilon), ("tau", params.tau), ("eta", params.eta), ("slack", params.reduction_slack)] {
        stamp.setting(key, v);
    }
    stamp.setting("reduce", !a.no_reduce);

    let full: Graph = match (&a.world, a.meters_per_step) {
        (Some(path), _) => {
            let world = load_world(&mut stamp, path)?;
            build_graph(&observations, &world.distance_estimator(), &params).input()?
        }
        (None, Some(mps)) => {
            if !(mps.is_finite() && mps > 0.0) {
                return Err(Failure::input("--meters-per-step must be > 0"));
            }
            stamp.setting("meters_per_step", mps);
            let est = |p: &ObservationNode, q: &ObservationNode| match (&p.position, &q.position) {
                (Some(a), Some(b)) => spatial_distance(a, b).map_or(UNREACHABLE_STEPS, |m| m / mps),
                _ => UNREACHABLE_STEPS,
            };
            build_graph(&observations, &est, &params).input()?
        }
        (None, None) => return Err(Failure::input("give --world or --meters-per-step for traversal estimates")),
    };
    let (graph, stats) = if a.no_reduce {
        let n = full.edge_count();
        (full, topoplan::graph::ReductionStats { before: n, removed: 0 })
    } else {
        reduce_graph(&full, params.reduction_slack)
    };

    write_output(&a.out, &(stamp.comment() + &render_graph(&graph)))?;
    println!(
        "nodes: {}  edges: {}  (predicate admitted {}, reduction removed {})",
        graph.node_count(),
        graph.edge_count(),
        stats.before,
        stats.removed
    );
    Ok(())
}
