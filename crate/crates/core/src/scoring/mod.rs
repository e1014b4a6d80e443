//! Landmark/node compatibility logits and their grounding probabilities.

mod io;
mod remote;
mod synthetic;

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::NodeId;
use crate::scalar::Scalar;

pub use io::{load_scores, parse_scores, render_scores, save_scores, SCORES_VERSION};
pub use remote::{fetch_remote_scores, RemoteScoreError, ScoreRequest, ScoreResponse, DEFAULT_CAPTION_TEMPLATE};
pub use synthetic::{synthetic_scores, NoiseSpec};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("score matrix has no nodes")]
    NoNodes,
    #[error("score matrix has no landmarks")]
    NoLandmarks,
    #[error("expected {expected} logits, found {actual}")]
    Shape { expected: String, actual: String },
    #[error("logit for landmark `{label}` at node {node} is not finite")]
    NonFinite { label: String, node: NodeId },
    #[error("duplicate landmark label `{0}`")]
    DuplicateLabel(String),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("landmark `{0}` is not in the world vocabulary")]
    UnknownLandmark(String),
    #[error("temperature must be finite and > 0")]
    Temperature,
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Raw compatibility logits; rows are landmarks, columns are nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix<S> {
    labels: Vec<String>,
    node_ids: Vec<NodeId>,
    logits: Vec<S>,
}

impl<S: Scalar> ScoreMatrix<S> {
    pub fn new(labels: Vec<String>, node_ids: Vec<NodeId>, logits: Vec<S>) -> Result<Self, ScoreError> {
        if logits.len() != labels.len() * node_ids.len() {
            return Err(ScoreError::Shape {
                expected: format!("{}x{}", labels.len(), node_ids.len()),
                actual: format!("{} values", logits.len()),
            });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(ScoreError::DuplicateLabel(l.clone()));
            }
        }
        let mut seen = HashSet::new();
        for &id in &node_ids {
            if !seen.insert(id) {
                return Err(ScoreError::DuplicateNode(id));
            }
        }
        let cols = node_ids.len();
        if let Some(k) = logits.iter().position(|x| !x.is_finite()) {
            return Err(ScoreError::NonFinite { label: labels[k / cols].clone(), node: node_ids[k % cols] });
        }
        Ok(Self { labels, node_ids, logits })
    }

    pub fn from_rows(labels: Vec<String>, node_ids: Vec<NodeId>, rows: Vec<Vec<S>>) -> Result<Self, ScoreError> {
        if rows.len() != labels.len() || rows.iter().any(|r| r.len() != node_ids.len()) {
            return Err(ScoreError::Shape {
                expected: format!("{}x{}", labels.len(), node_ids.len()),
                actual: format!("{}x[{}]", rows.len(), rows.iter().map(|r| r.len().to_string()).collect::<Vec<_>>().join(",")),
            });
        }
        Self::new(labels, node_ids, rows.into_iter().flatten().collect())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn logits(&self) -> &[S] {
        &self.logits
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.logits.chunks(self.node_ids.len().max(1)).take(self.labels.len())
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn row(&self, index: usize) -> &[S] {
        let n = self.node_ids.len();
        &self.logits[index * n..(index + 1) * n]
    }

    pub fn column_of(&self, node: NodeId) -> Option<usize> {
        self.node_ids.iter().position(|&id| id == node)
    }

    pub fn logit(&self, row: usize, node: NodeId) -> Option<S> {
        self.column_of(node).map(|c| self.row(row)[c])
    }

    /// Adds `shift[i]` to every logit of row `i`.
    pub fn shifted(&self, shift: &[S]) -> Self {
        let n = self.node_ids.len();
        let logits = self.logits.iter().enumerate().map(|(k, &x)| x + shift[k / n]).collect();
        Self { labels: self.labels.clone(), node_ids: self.node_ids.clone(), logits }
    }
}

/// Per-landmark probability over nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundingDistribution<S> {
    labels: Vec<String>,
    node_ids: Vec<NodeId>,
    probs: Vec<S>,
}

impl<S: Scalar> GroundingDistribution<S> {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn row(&self, index: usize) -> &[S] {
        let n = self.node_ids.len();
        &self.probs[index * n..(index + 1) * n]
    }

    pub fn probability(&self, row: usize, node: NodeId) -> Option<S> {
        self.node_ids.iter().position(|&id| id == node).map(|c| self.row(row)[c])
    }
}

/// Row-wise softmax of the logits, normalized over every node.
pub fn softmax_grounding<S: Scalar>(m: &ScoreMatrix<S>) -> Result<GroundingDistribution<S>, ScoreError> {
    softmax_grounding_with_temperature(m, S::one())
}

pub fn softmax_grounding_with_temperature<S: Scalar>(
    m: &ScoreMatrix<S>,
    temperature: S,
) -> Result<GroundingDistribution<S>, ScoreError> {
    if m.node_ids.is_empty() {
        return Err(ScoreError::NoNodes);
    }
    if m.labels.is_empty() {
        return Err(ScoreError::NoLandmarks);
    }
    if !(temperature.is_finite() && temperature > S::zero()) {
        return Err(ScoreError::Temperature);
    }
    let mut probs = Vec::with_capacity(m.logits.len());
    for row in m.rows() {
        let max = row.iter().copied().fold(S::neg_infinity(), S::max);
        let exps: Vec<S> = row.iter().map(|&x| ((x - max) / temperature).exp()).collect();
        let total: S = exps.iter().copied().sum();
        probs.extend(exps.into_iter().map(|e| e / total));
    }
    Ok(GroundingDistribution { labels: m.labels.clone(), node_ids: m.node_ids.clone(), probs })
}

/// `ln sum exp` of a row, used to convert logits to log-probabilities.
pub fn log_normalizer<S: Scalar>(row: &[S]) -> S {
    let max = row.iter().copied().fold(S::neg_infinity(), S::max);
    max + row.iter().map(|&x| (x - max).exp()).sum::<S>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(rows: Vec<Vec<f64>>) -> ScoreMatrix<f64> {
        let labels = (0..rows.len()).map(|i| format!("l{i}")).collect();
        let ids = (0..rows[0].len() as u64).collect();
        ScoreMatrix::from_rows(labels, ids, rows).unwrap()
    }

    /// Independent softmax: direct exponentiation without max subtraction.
    fn naive_softmax(row: &[f64]) -> Vec<f64> {
        let z: f64 = row.iter().map(|x| x.exp()).sum();
        row.iter().map(|x| x.exp() / z).collect()
    }

    #[test]
    fn equal_logits_are_uniform() {
        let p = softmax_grounding(&matrix(vec![vec![2.5; 4]])).unwrap();
        assert!(p.row(0).iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn ln3_gives_quarter_and_three_quarters() {
        let p = softmax_grounding(&matrix(vec![vec![0.0, 3f64.ln()]])).unwrap();
        assert!((p.row(0)[0] - 0.25).abs() < 1e-15);
        assert!((p.row(0)[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn matches_naive_oracle_on_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..5).map(|_| (0..7).map(|_| rng.random_range(-10.0..10.0)).collect()).collect();
        let p = softmax_grounding(&matrix(rows.clone())).unwrap();
        for (i, r) in rows.iter().enumerate() {
            for (a, b) in p.row(i).iter().zip(naive_softmax(r)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn huge_logits_do_not_overflow() {
        let p = softmax_grounding(&matrix(vec![vec![1000.0, 1000.0 + 2f64.ln()]])).unwrap();
        assert!((p.row(0)[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let empty = ScoreMatrix::<f64>::new(vec!["a".into()], vec![], vec![]).unwrap();
        assert!(matches!(softmax_grounding(&empty), Err(ScoreError::NoNodes)));
        assert!(matches!(ScoreMatrix::new(vec!["a".into()], vec![1, 2], vec![0.0]), Err(ScoreError::Shape { .. })));
        assert!(matches!(
            ScoreMatrix::new(vec!["a".into()], vec![1, 2], vec![0.0, f64::INFINITY]),
            Err(ScoreError::NonFinite { node: 2, .. })
        ));
        assert!(matches!(softmax_grounding_with_temperature(&matrix(vec![vec![0.0]]), 0.0), Err(ScoreError::Temperature)));
    }

    #[test]
    fn temperature_flattens() {
        let m = matrix(vec![vec![0.0, 2.0]]);
        let cold = softmax_grounding(&m).unwrap();
        let warm = softmax_grounding_with_temperature(&m, 4.0).unwrap();
        assert!(warm.row(0)[1] < cold.row(0)[1]);
        assert!((warm.row(0)[1] - naive_softmax(&[0.0, 0.5])[1]).abs() < 1e-15);
    }

    #[test]
    fn log_normalizer_matches_definition() {
        let row = [0.3, -1.0, 2.0];
        let direct = row.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_normalizer(&row) - direct).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn rows_sum_to_one_and_shift_invariant(
            row in proptest::collection::vec(-50.0..50.0f64, 1..20),
            c in -100.0..100.0f64,
        ) {
            let p = softmax_grounding(&matrix(vec![row.clone()])).unwrap();
            let s: f64 = p.row(0).iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-9);
            prop_assert!(p.row(0).iter().all(|&x| x > 0.0 && x <= 1.0));
            let shifted: Vec<f64> = row.iter().map(|x| x + c).collect();
            let q = softmax_grounding(&matrix(vec![shifted])).unwrap();
            for (a, b) in p.row(0).iter().zip(q.row(0)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn raising_a_logit_is_monotone(
            row in proptest::collection::vec(-5.0..5.0f64, 2..10),
            k in 0usize..10,
            bump in 0.01..3.0f64,
        ) {
            let k = k % row.len();
            let p = softmax_grounding(&matrix(vec![row.clone()])).unwrap();
            let mut up = row.clone();
            up[k] += bump;
            let q = softmax_grounding(&matrix(vec![up])).unwrap();
            for j in 0..row.len() {
                if j == k {
                    prop_assert!(q.row(0)[j] > p.row(0)[j]);
                } else {
                    prop_assert!(q.row(0)[j] < p.row(0)[j]);
                }
            }
        }
    }
}
