use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use topoplan::eval::{evaluate_case, render_csv_table, render_text_table, EvalReport, EvalSuite, PlannerKind, SuiteContext};
use topoplan::PlannerParams;

use super::{load_graph, load_scores, load_world, make_parser, thread_pool};
use crate::config;
use crate::failure::{Classify, CliResult, Failure};
use crate::stamp::{check_output, read_input, to_json, write_output, Stamp};
use crate::{Context, ParserChoice};

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    scores: PathBuf,
    /// World with ground-truth placements for the "valid, not identical" clause.
    #[arg(long)]
    world: Option<PathBuf>,
    /// Planners to compare, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [PlannerKind::Dp, PlannerKind::Ml])]
    planner: Vec<PlannerKind>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Extract landmarks from each instruction instead of using ground truth.
    #[arg(long, value_enum)]
    parser: Option<ParserChoice>,
    /// Report file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated summary table.
    #[arg(long)]
    table: Option<PathBuf>,
}

pub fn run(ctx: &Context, a: EvalArgs) -> CliResult {
    check_output(&a.out)?;
    if let Some(t) = &a.table {
        check_output(t)?;
    }
    let gamma = config::gamma(a.gamma, &ctx.config)?;
    let mut stamp = Stamp::new("eval");
    let suite_text = read_input(&mut stamp, "suite", &a.suite)?;
    let suite = EvalSuite::from_json(&suite_text).map_err(|e| Failure::input(format!("{}: {e}", a.suite.display())))?;
    let graph = load_graph(&mut stamp, &a.graph)?;
    let scores = load_scores(&mut stamp, &a.scores)?;
    let world = a.world.as_ref().map(|p| load_world(&mut stamp, p)).transpose()?;
    for case in &suite.cases {
        case.validate(&graph).input()?;
    }
    let parser = a.parser.map(|p| make_parser(ctx, p, &mut stamp)).transpose()?;
    stamp.setting("gamma", gamma);
    stamp.setting("planners", &a.planner);

    let ctx_eval = SuiteContext {
        graph: &graph,
        scores: &scores,
        params: PlannerParams::new(gamma).input()?,
        truth: world.as_ref().map(|w| &w.placements),
        parser: parser.as_deref(),
    };
    let jobs: Vec<_> = suite.cases.iter().flat_map(|c| a.planner.iter().map(move |&p| (c, p))).collect();
    let records = thread_pool(ctx)?.install(|| jobs.par_iter().map(|&(c, p)| evaluate_case(&ctx_eval, c, p)).collect());
    let report = EvalReport::from_records(&suite.name, gamma, records);

    let mut doc = serde_json::to_value(&report).internal()?;
    doc["stamp"] = serde_json::to_value(&stamp).internal()?;
    write_output(&a.out, &to_json(&doc))?;
    if let Some(t) = &a.table {
        write_output(t, &(stamp.comment() + &render_csv_table(&report)))?;
    }
    print!("{}", render_text_table(&report));
    Ok(())
}
