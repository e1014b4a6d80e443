//! Planning success and efficiency over query suites.

mod table;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, TopoGraph};
use crate::parsing::{Instruction, LandmarkList, LandmarkParser};
use crate::planner::{brute_force_plan, plan, plan_max_likelihood, traversal_probability, BruteForceBudget, PlannerParams, Walk};
use crate::scalar::Scalar;
use crate::scoring::ScoreMatrix;

pub use table::{render_csv_table, render_text_table};

pub const SUITE_VERSION: &str = "eval-suite/1";
pub const REPORT_VERSION: &str = "eval-report/1";

/// Ground-truth landmark placements, label to carrying nodes.
pub type Placements = BTreeMap<String, BTreeSet<NodeId>>;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("route length units differ: described in {described}, planned in {planned}")]
    UnitMismatch { described: LengthUnit, planned: LengthUnit },
    #[error("route length must be finite and {what}, got {value}")]
    InvalidLength { what: &'static str, value: f64 },
    #[error("case `{case}`: {msg}")]
    InvalidCase { case: String, msg: String },
    #[error("unsupported suite version `{0}`")]
    Version(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    TimeSteps,
    Meters,
}

impl fmt::Display for LengthUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthUnit::TimeSteps => "time_steps",
            LengthUnit::Meters => "meters",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteLength {
    pub value: f64,
    pub unit: LengthUnit,
}

impl RouteLength {
    pub fn time_steps(value: f64) -> Self {
        Self { value, unit: LengthUnit::TimeSteps }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryCase {
    pub id: String,
    pub instruction: Instruction,
    pub ground_truth_landmarks: LandmarkList,
    pub ground_truth_route: Vec<NodeId>,
    pub described_route_length: RouteLength,
    pub start: NodeId,
}

impl QueryCase {
    /// Checks the route is a walk in `g` from `start` and the length is positive.
    pub fn validate<S: Scalar>(&self, g: &TopoGraph<S>) -> Result<(), EvalError> {
        let bad = |msg: String| EvalError::InvalidCase { case: self.id.clone(), msg };
        if !g.contains(self.start) {
            return Err(bad(format!("start node {} is not in the graph", self.start)));
        }
        if self.ground_truth_route.first() != Some(&self.start) {
            return Err(bad("ground-truth route must begin at the start node".into()));
        }
        if let Some(&v) = self.ground_truth_route.iter().find(|v| !g.contains(**v)) {
            return Err(bad(format!("route node {v} is not in the graph")));
        }
        if let Some(w) = self.ground_truth_route.windows(2).find(|w| g.distance(w[0], w[1]).is_none()) {
            return Err(bad(format!("route step {} -> {} is not an edge", w[0], w[1])));
        }
        let len = self.described_route_length.value;
        if !(len.is_finite() && len > 0.0) {
            return Err(bad(format!("described route length must be > 0, got {len}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSuite {
    pub version: String,
    pub name: String,
    pub cases: Vec<QueryCase>,
}

impl EvalSuite {
    pub fn new(name: impl Into<String>, cases: Vec<QueryCase>) -> Self {
        Self { version: SUITE_VERSION.to_string(), name: name.into(), cases }
    }

    pub fn from_json(text: &str) -> Result<Self, Box<dyn std::error::Error + Send + Sync>> {
        let suite: Self = serde_json::from_str(text)?;
        if suite.version != SUITE_VERSION {
            return Err(Box::new(EvalError::Version(suite.version)));
        }
        Ok(suite)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Success,
    Failure,
    /// Route differs from ground truth and no placements were available.
    Indeterminate,
}

/// Success if the walk equals the ground-truth route, or if every assigned
/// node carries its ground-truth landmark.
pub fn planning_success<S>(case: &QueryCase, walk: &Walk<S>, truth: Option<&Placements>) -> Verdict {
    if walk.nodes == case.ground_truth_route {
        return Verdict::Success;
    }
    let Some(truth) = truth else {
        return Verdict::Indeterminate;
    };
    let landmarks = &case.ground_truth_landmarks;
    if walk.assignments.len() != landmarks.len() {
        return Verdict::Failure;
    }
    let all = landmarks
        .iter()
        .zip(&walk.assignments)
        .all(|(l, &t)| walk.nodes.get(t).is_some_and(|v| truth.get(l).is_some_and(|set| set.contains(v))));
    if all {
        Verdict::Success
    } else {
        Verdict::Failure
    }
}

/// `min(1, described / planned)`.
pub fn planning_efficiency(described: RouteLength, planned: RouteLength) -> Result<f64, EvalError> {
    if described.unit != planned.unit {
        return Err(EvalError::UnitMismatch { described: described.unit, planned: planned.unit });
    }
    if !(described.value.is_finite() && described.value > 0.0) {
        return Err(EvalError::InvalidLength { what: "> 0", value: described.value });
    }
    if !(planned.value.is_finite() && planned.value >= 0.0) {
        return Err(EvalError::InvalidLength { what: ">= 0", value: planned.value });
    }
    if planned.value <= described.value {
        return Ok(1.0);
    }
    Ok(described.value / planned.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Dp,
    Ml,
    Oracle,
}

impl PlannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Dp => "dp",
            PlannerKind::Ml => "ml",
            PlannerKind::Oracle => "oracle",
        }
    }

    pub fn run<S: Scalar>(
        self,
        g: &TopoGraph<S>,
        m: &ScoreMatrix<S>,
        landmarks: &[String],
        start: NodeId,
        params: &PlannerParams<S>,
    ) -> Result<Walk<S>, crate::planner::PlanError> {
        match self {
            PlannerKind::Dp => plan(g, m, landmarks, start, params),
            PlannerKind::Ml => plan_max_likelihood(g, m, landmarks, start, params),
            PlannerKind::Oracle => brute_force_plan(g, m, landmarks, start, params, BruteForceBudget::default()),
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dp" => Ok(PlannerKind::Dp),
            "ml" => Ok(PlannerKind::Ml),
            "oracle" => Ok(PlannerKind::Oracle),
            other => Err(format!("unknown planner `{other}` (expected dp, ml or oracle)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub planner: PlannerKind,
    pub verdict: Verdict,
    /// 1 on success, 0 on failure, absent when indeterminate.
    pub planning_success: Option<u8>,
    pub planning_efficiency: Option<f64>,
    pub score: Option<f64>,
    pub traversal_probability: Option<f64>,
    pub landmarks: Vec<String>,
    pub walk: Vec<NodeId>,
    pub assigned_nodes: Vec<NodeId>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerSummary {
    pub planner: PlannerKind,
    pub cases: usize,
    /// Cases with a definite verdict; indeterminate ones are excluded.
    pub evaluated: usize,
    pub successes: usize,
    pub mean_success: f64,
    /// Mean efficiency over successful cases only; absent with no successes.
    pub mean_efficiency: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: String,
    pub suite: String,
    pub gamma: f64,
    pub records: Vec<CaseRecord>,
    pub summaries: Vec<PlannerSummary>,
}

impl EvalReport {
    /// Builds a report, recomputing aggregates from the records.
    pub fn from_records(suite: &str, gamma: f64, records: Vec<CaseRecord>) -> Self {
        let mut by: BTreeMap<PlannerKind, Vec<&CaseRecord>> = BTreeMap::new();
        for r in &records {
            by.entry(r.planner).or_default().push(r);
        }
        let summaries = by
            .into_iter()
            .map(|(planner, recs)| {
                let evaluated: Vec<_> = recs.iter().filter(|r| r.planning_success.is_some()).collect();
                let wins: Vec<_> = evaluated.iter().filter(|r| r.planning_success == Some(1)).collect();
                let indeterminate = recs.len() - evaluated.len();
                if indeterminate > 0 {
                    log::warn!("{planner}: {indeterminate} indeterminate case(s) excluded from aggregates");
                }
                let effs: Vec<f64> = wins.iter().filter_map(|r| r.planning_efficiency).collect();
                PlannerSummary {
                    planner,
                    cases: recs.len(),
                    evaluated: evaluated.len(),
                    successes: wins.len(),
                    mean_success: if evaluated.is_empty() { 0.0 } else { wins.len() as f64 / evaluated.len() as f64 },
                    mean_efficiency: (!effs.is_empty()).then(|| effs.iter().sum::<f64>() / effs.len() as f64),
                }
            })
            .collect();
        Self { version: REPORT_VERSION.to_string(), suite: suite.to_string(), gamma, records, summaries }
    }

    pub fn summary(&self, planner: PlannerKind) -> Option<&PlannerSummary> {
        self.summaries.iter().find(|s| s.planner == planner)
    }
}

/// Inputs shared by every case of a suite run.
pub struct SuiteContext<'a, S> {
    pub graph: &'a TopoGraph<S>,
    pub scores: &'a ScoreMatrix<S>,
    pub params: PlannerParams<S>,
    pub truth: Option<&'a Placements>,
    /// When set, landmarks come from the parser instead of ground truth.
    pub parser: Option<&'a dyn LandmarkParser>,
}

/// Evaluates one planner on one case. Failures become records, not errors.
pub fn evaluate_case<S: Scalar>(ctx: &SuiteContext<'_, S>, case: &QueryCase, planner: PlannerKind) -> CaseRecord {
    let mut rec = CaseRecord {
        case_id: case.id.clone(),
        planner,
        verdict: Verdict::Failure,
        planning_success: Some(0),
        planning_efficiency: None,
        score: None,
        traversal_probability: None,
        landmarks: Vec::new(),
        walk: Vec::new(),
        assigned_nodes: Vec::new(),
        failure: None,
    };
    if let Err(e) = case.validate(ctx.graph) {
        rec.failure = Some(e.to_string());
        return rec;
    }
    let landmarks = match ctx.parser {
        Some(p) => match p.extract(&case.instruction) {
            Ok(l) => l.into_inner(),
            Err(e) => {
                rec.failure = Some(format!("parse: {e}"));
                return rec;
            }
        },
        None => case.ground_truth_landmarks.to_vec(),
    };
    rec.landmarks = landmarks.clone();
    let walk = match planner.run(ctx.graph, ctx.scores, &landmarks, case.start, &ctx.params) {
        Ok(w) => w,
        Err(e) => {
            rec.failure = Some(format!("plan: {e}"));
            return rec;
        }
    };
    rec.verdict = planning_success(case, &walk, ctx.truth);
    rec.planning_success = match rec.verdict {
        Verdict::Success => Some(1),
        Verdict::Failure => Some(0),
        Verdict::Indeterminate => None,
    };
    let planned = RouteLength::time_steps(walk.travel_cost.to_f64_lossless());
    match planning_efficiency(case.described_route_length, planned) {
        Ok(e) => rec.planning_efficiency = Some(e),
        Err(e) => rec.failure = Some(e.to_string()),
    }
    rec.score = Some(walk.score.to_f64_lossless());
    rec.traversal_probability =
        traversal_probability(ctx.graph, &walk.nodes, ctx.params.gamma()).ok().map(|p| p.to_f64_lossless());
    rec.assigned_nodes = (0..walk.assignments.len()).map(|i| walk.assigned_node(i)).collect();
    rec.walk = walk.nodes;
    rec
}

/// Runs every planner on every case, in case order then planner order.
pub fn run_suite<S: Scalar>(suite: &EvalSuite, ctx: &SuiteContext<'_, S>, planners: &[PlannerKind]) -> EvalReport {
    let records =
        suite.cases.iter().flat_map(|c| planners.iter().map(move |&p| (c, p))).map(|(c, p)| evaluate_case(ctx, c, p)).collect();
    EvalReport::from_records(&suite.name, ctx.params.gamma().to_f64_lossless(), records)
}
