use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use topoplan::eval::PlannerKind;
use topoplan::graph::NodeId;
use topoplan::planner::traversal_probability;
use topoplan::scoring::softmax_grounding;
use topoplan::PlannerParams;

use super::{export::geojson, load_graph, load_scores, resolve_landmarks};
use crate::config;
use crate::failure::{plan_failure, Classify, CliResult, Failure};
use crate::stamp::{check_output, to_json, write_output, Stamp};
use crate::{Context, LandmarkSource};

pub const PLAN_VERSION: &str = "plan/1";

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    scores: PathBuf,
    #[command(flatten)]
    landmarks: LandmarkSource,
    #[arg(long)]
    start: NodeId,
    /// Per-time-step survival probability in (0, 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// dp, ml or oracle.
    #[arg(long)]
    planner: Option<PlannerKind>,
    #[arg(long)]
    out: PathBuf,
    /// Print each landmark's node, logit, probability and running score.
    #[arg(long)]
    explain: bool,
    /// Also write the graph and walk as GeoJSON here.
    #[arg(long)]
    export_geometry: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LandmarkStep {
    pub label: String,
    /// 0-based index into `walk`.
    pub position: usize,
    pub node: NodeId,
    pub logit: f64,
    pub probability: f64,
    /// Score of the walk prefix ending at this match.
    pub running_score: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PlanFile {
    pub version: String,
    pub planner: PlannerKind,
    pub gamma: f64,
    pub alpha: f64,
    pub start: NodeId,
    pub instruction: Option<String>,
    pub walk: Vec<NodeId>,
    /// 0-based positions in `walk`, one per landmark.
    pub assignments: Vec<usize>,
    pub landmarks: Vec<LandmarkStep>,
    pub score: f64,
    pub match_sum: f64,
    pub travel_cost: f64,
    pub traversal_probability: f64,
}

pub fn run(ctx: &Context, a: PlanArgs) -> CliResult {
    check_output(&a.out)?;
    if let Some(p) = &a.export_geometry {
        check_output(p)?;
    }
    let gamma = config::gamma(a.gamma, &ctx.config)?;
    let planner = match a.planner {
        Some(p) => p,
        None => ctx.config.planner.as_deref().map_or(Ok(PlannerKind::Dp), str::parse).map_err(Failure::input)?,
    };
    let mut stamp = Stamp::new("plan");
    let graph = load_graph(&mut stamp, &a.graph)?;
    let scores = load_scores(&mut stamp, &a.scores)?;
    let landmarks = resolve_landmarks(ctx, &a.landmarks, &mut stamp)?;
    stamp.setting("gamma", gamma);
    stamp.setting("planner", planner);
    stamp.setting("start", a.start);

    let params = PlannerParams::new(gamma).input()?;
    let walk = planner.run(&graph, &scores, &landmarks, a.start, &params).map_err(plan_failure)?;
    let grounding = softmax_grounding(&scores).internal()?;
    let alpha = params.alpha();

    let mut prefix = vec![0.0; walk.nodes.len()];
    for k in 1..walk.nodes.len() {
        prefix[k] = prefix[k - 1] + graph.distance(walk.nodes[k - 1], walk.nodes[k]).expect("planned walks follow edges");
    }
    let mut matched = 0.0;
    let mut steps = Vec::with_capacity(landmarks.len());
    for (label, &pos) in landmarks.iter().zip(&walk.assignments) {
        let node = walk.nodes[pos];
        let row = scores.row_index(label).expect("planner checked every landmark row");
        let logit = scores.logit(row, node).expect("planner checked every node column");
        matched += logit;
        steps.push(LandmarkStep {
            label: label.clone(),
            position: pos,
            node,
            logit,
            probability: grounding.probability(row, node).expect("same shape as the scores"),
            running_score: matched - alpha * prefix[pos],
        });
    }
    let plan = PlanFile {
        version: PLAN_VERSION.to_string(),
        planner,
        gamma,
        alpha,
        start: a.start,
        instruction: a.landmarks.instruction.clone(),
        assignments: walk.assignments.clone(),
        traversal_probability: traversal_probability(&graph, &walk.nodes, gamma).map_err(plan_failure)?,
        walk: walk.nodes,
        landmarks: steps,
        score: walk.score,
        match_sum: walk.match_sum,
        travel_cost: walk.travel_cost,
    };

    let mut doc = serde_json::to_value(&plan).internal()?;
    doc["stamp"] = serde_json::to_value(&stamp).internal()?;
    write_output(&a.out, &to_json(&doc))?;
    if let Some(p) = &a.export_geometry {
        write_output(p, &to_json(&geojson(&graph, Some(&plan.walk), &stamp)))?;
    }

    if a.explain {
        println!("{:<24} {:>6} {:>8} {:>10} {:>12} {:>12}", "landmark", "step", "node", "logit", "probability", "running R");
        for s in &plan.landmarks {
            println!(
                "{:<24} {:>6} {:>8} {:>10.4} {:>12.6} {:>12.4}",
                s.label, s.position, s.node, s.logit, s.probability, s.running_score
            );
        }
    }
    println!(
        "{} walk of {} nodes: R = {:.6}, travel = {:.3} steps, traversal probability = {:.6}",
        plan.planner,
        plan.walk.len(),
        plan.score,
        plan.travel_cost,
        plan.traversal_probability
    );
    Ok(())
}
