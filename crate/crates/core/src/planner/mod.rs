//! Walk search over a topological graph.
//!
//! A walk `v_1 .. v_k` paired with a non-decreasing assignment of landmarks
//! to walk positions is scored as
//!
//! ```text
//! R = sum_i logit(landmark_i, v[t_i]) - alpha * sum_j D(v_j, v_{j+1}),  alpha = -ln(gamma)
//! ```
//!
//! Because a grounding log-probability differs from its logit only by a
//! per-landmark constant, maximizing `R` also maximizes the product of the
//! landmark grounding probabilities and the traversal survival probability
//! `gamma^(sum D)`.

mod brute;
mod dp;
mod ml;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Adjacency, NodeId, TopoGraph};
use crate::scalar::Scalar;
use crate::scoring::ScoreMatrix;

pub use brute::{brute_force_plan, BruteForceBudget};
pub use dp::{plan, plan_with_table, DpTable, Step};
pub use ml::{floyd_warshall, plan_max_likelihood, AllPairs};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("start node {0} is not in the graph")]
    UnknownStart(NodeId),
    #[error("no score row for landmark `{0}`")]
    MissingLandmark(String),
    #[error("score matrix has no column for node {0}")]
    MissingNodeScore(NodeId),
    #[error("no walk reaches landmark phase {phase}")]
    Unreachable { phase: usize },
    #[error("landmark `{landmark}` (target node {target}) is unreachable from node {from}")]
    UnreachableTarget { landmark: String, target: NodeId, from: NodeId },
    #[error("gamma must lie in (0, 1), got {0}")]
    InvalidGamma(f64),
    #[error("walk violates its contract: {0}")]
    Contract(String),
    #[error("enumeration budget exceeded: {walks} walks, {evaluations} walk/assignment pairs (limit {limit})")]
    BudgetExceeded { walks: u128, evaluations: u128, limit: u128 },
}

/// Per-time-step survival probability and the derived travel penalty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams<S> {
    gamma: S,
}

impl<S: Scalar> PlannerParams<S> {
    pub fn new(gamma: S) -> Result<Self, PlanError> {
        let ok = gamma > S::zero() && gamma < S::one() && (-gamma.ln()).is_finite();
        if !ok {
            return Err(PlanError::InvalidGamma(gamma.to_f64_lossless()));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    /// `alpha = -ln(gamma)`, strictly positive.
    pub fn alpha(&self) -> S {
        -self.gamma.ln()
    }
}

/// A node sequence with landmark assignments and its score breakdown.
///
/// `assignments[i]` is the 0-based position in `nodes` where landmark `i`
/// is matched.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Walk<S> {
    pub nodes: Vec<NodeId>,
    pub assignments: Vec<usize>,
    pub score: S,
    pub match_sum: S,
    pub travel_cost: S,
}

impl<S: Scalar> Walk<S> {
    /// Validates the walk against the graph and computes its score.
    pub fn evaluate(
        g: &TopoGraph<S>,
        m: &ScoreMatrix<S>,
        landmarks: &[String],
        nodes: Vec<NodeId>,
        assignments: Vec<usize>,
        params: &PlannerParams<S>,
    ) -> Result<Self, PlanError> {
        let travel_cost = travel_cost(g, &nodes)?;
        if assignments.len() != landmarks.len() {
            return Err(PlanError::Contract(format!("{} assignments for {} landmarks", assignments.len(), landmarks.len())));
        }
        if assignments.windows(2).any(|w| w[0] > w[1]) {
            return Err(PlanError::Contract("assignments must be non-decreasing".into()));
        }
        let mut match_sum = S::zero();
        for (label, &pos) in landmarks.iter().zip(&assignments) {
            let node = *nodes.get(pos).ok_or_else(|| {
                PlanError::Contract(format!("assignment {pos} out of range for a walk of {} nodes", nodes.len()))
            })?;
            let row = m.row_index(label).ok_or_else(|| PlanError::MissingLandmark(label.clone()))?;
            match_sum = match_sum + m.logit(row, node).ok_or(PlanError::MissingNodeScore(node))?;
        }
        let score = match_sum - params.alpha() * travel_cost;
        Ok(Self { nodes, assignments, score, match_sum, travel_cost })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node matched to landmark `i`.
    pub fn assigned_node(&self, i: usize) -> NodeId {
        self.nodes[self.assignments[i]]
    }
}

fn travel_cost<S: Scalar>(g: &TopoGraph<S>, nodes: &[NodeId]) -> Result<S, PlanError> {
    if nodes.is_empty() {
        return Err(PlanError::Contract("walk has no nodes".into()));
    }
    if let Some(&n) = nodes.iter().find(|&&n| !g.contains(n)) {
        return Err(PlanError::Contract(format!("node {n} is not in the graph")));
    }
    let mut total = S::zero();
    for w in nodes.windows(2) {
        total = total + g.distance(w[0], w[1]).ok_or_else(|| PlanError::Contract(format!("no edge {} -> {}", w[0], w[1])))?;
    }
    Ok(total)
}

/// Score of an existing walk: matched logits minus `alpha` times travel.
pub fn walk_score<S: Scalar>(
    g: &TopoGraph<S>,
    m: &ScoreMatrix<S>,
    landmarks: &[String],
    walk: &Walk<S>,
    params: &PlannerParams<S>,
) -> Result<S, PlanError> {
    Walk::evaluate(g, m, landmarks, walk.nodes.clone(), walk.assignments.clone(), params).map(|w| w.score)
}

/// Probability of completing `nodes` without a per-step exit: `gamma^(sum D)`.
pub fn traversal_probability<S: Scalar>(g: &TopoGraph<S>, nodes: &[NodeId], gamma: S) -> Result<S, PlanError> {
    Ok(gamma.powf(travel_cost(g, nodes)?))
}

/// Landmark rows resolved against the dense node index of `adj`.
pub(crate) fn logit_table<S: Scalar>(
    adj: &Adjacency<S>,
    m: &ScoreMatrix<S>,
    landmarks: &[String],
) -> Result<Vec<Vec<S>>, PlanError> {
    let cols: Vec<usize> =
        adj.ids().iter().map(|&id| m.column_of(id).ok_or(PlanError::MissingNodeScore(id))).collect::<Result<_, _>>()?;
    landmarks
        .iter()
        .map(|l| {
            let row = m.row(m.row_index(l).ok_or_else(|| PlanError::MissingLandmark(l.clone()))?);
            Ok(cols.iter().map(|&c| row[c]).collect())
        })
        .collect()
}
