//! Exhaustive search used to check the DP planner on small instances.

use super::{PlanError, PlannerParams, Walk};
use crate::graph::{NodeId, TopoGraph};
use crate::scalar::Scalar;
use crate::scoring::ScoreMatrix;

#[derive(Clone, Copy, Debug)]
pub struct BruteForceBudget {
    /// Longest walk enumerated, in nodes.
    pub max_len: usize,
    /// Refuse when the number of (walk, assignment) pairs exceeds this.
    pub max_evaluations: u128,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        Self { max_len: 8, max_evaluations: 50_000_000 }
    }
}

fn multisets(k: u128, n: u128) -> u128 {
    // C(k + n - 1, n): non-decreasing maps from n landmarks into k positions.
    let mut c: u128 = 1;
    for i in 0..n {
        c = c * (k + i) / (i + 1);
    }
    c
}

struct Best<S> {
    score: S,
    nodes: Vec<NodeId>,
    assignments: Vec<usize>,
}

/// Enumerates every walk from `start` of at most `budget.max_len` nodes and
/// every monotone assignment, returning the highest-scoring pair. Ties go to
/// the shorter walk, then the lexicographically smaller node sequence, then
/// the smaller assignment.
pub fn brute_force_plan<S: Scalar>(
    g: &TopoGraph<S>,
    m: &ScoreMatrix<S>,
    landmarks: &[String],
    start: NodeId,
    params: &PlannerParams<S>,
    budget: BruteForceBudget,
) -> Result<Walk<S>, PlanError> {
    if !g.contains(start) {
        return Err(PlanError::UnknownStart(start));
    }
    let rows: Vec<usize> = landmarks
        .iter()
        .map(|l| m.row_index(l).ok_or_else(|| PlanError::MissingLandmark(l.clone())))
        .collect::<Result<_, _>>()?;
    if let Some(id) = g.node_ids().find(|&id| m.column_of(id).is_none()) {
        return Err(PlanError::MissingNodeScore(id));
    }

    let succ = |v: NodeId| -> Vec<(NodeId, S)> { g.node_ids().filter_map(|w| g.distance(v, w).map(|d| (w, d))).collect() };

    // Count walks per length before enumerating anything.
    let ids: Vec<NodeId> = g.node_ids().collect();
    let mut counts: Vec<u128> = ids.iter().map(|&v| u128::from(v == start)).collect();
    let (mut walks, mut evaluations) = (0u128, 0u128);
    for k in 1..=budget.max_len {
        let here: u128 = counts.iter().sum();
        walks += here;
        evaluations += here * multisets(k as u128, landmarks.len() as u128);
        let mut next = vec![0u128; ids.len()];
        for (i, &v) in ids.iter().enumerate() {
            if counts[i] == 0 {
                continue;
            }
            for (w, _) in succ(v) {
                let j = ids.binary_search(&w).expect("known node");
                next[j] = next[j].saturating_add(counts[i]);
            }
        }
        counts = next;
        if evaluations > budget.max_evaluations {
            break;
        }
    }
    if evaluations > budget.max_evaluations {
        return Err(PlanError::BudgetExceeded { walks, evaluations, limit: budget.max_evaluations });
    }

    let alpha = params.alpha();
    let mut best: Option<Best<S>> = None;
    let mut stack: Vec<(NodeId, S)> = vec![(start, S::zero())];
    let mut cursor: Vec<std::vec::IntoIter<(NodeId, S)>> = vec![succ(start).into_iter()];
    loop {
        let nodes: Vec<NodeId> = stack.iter().map(|&(v, _)| v).collect();
        let travel: S = stack.iter().map(|&(_, d)| d).sum();
        score_walk(m, &rows, &nodes, travel * alpha, &mut best);

        // Descend if allowed, otherwise advance to the next sibling.
        let mut advanced = false;
        if stack.len() < budget.max_len {
            if let Some((w, d)) = cursor.last_mut().and_then(Iterator::next) {
                stack.push((w, d));
                cursor.push(succ(w).into_iter());
                advanced = true;
            }
        }
        while !advanced {
            if stack.len() <= 1 {
                let b = best.expect("the start walk is always scored");
                return Walk::evaluate(g, m, landmarks, b.nodes, b.assignments, params);
            }
            stack.pop();
            cursor.pop();
            if let Some((w, d)) = cursor.last_mut().and_then(Iterator::next) {
                stack.push((w, d));
                cursor.push(succ(w).into_iter());
                advanced = true;
            }
        }
    }
}

fn score_walk<S: Scalar>(m: &ScoreMatrix<S>, rows: &[usize], nodes: &[NodeId], penalty: S, best: &mut Option<Best<S>>) {
    let mut assignment = vec![0usize; rows.len()];
    let mut each = |assignment: &[usize]| {
        let matched: S = rows.iter().zip(assignment).map(|(&r, &p)| m.logit(r, nodes[p]).expect("column checked")).sum();
        let score = matched - penalty;
        let better = match best {
            None => true,
            Some(b) => {
                score > b.score
                    || (score == b.score
                        && (nodes.len(), nodes, assignment) < (b.nodes.len(), b.nodes.as_slice(), b.assignments.as_slice()))
            }
        };
        if better {
            *best = Some(Best { score, nodes: nodes.to_vec(), assignments: assignment.to_vec() });
        }
    };
    enumerate(0, 0, nodes.len(), &mut assignment, &mut each);
}

fn enumerate(i: usize, lo: usize, k: usize, a: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if i == a.len() {
        f(a);
        return;
    }
    for p in lo..k {
        a[i] = p;
        enumerate(i + 1, p, k, a, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Frame, ObservationNode, Provenance};

    fn path_instance() -> (TopoGraph<f64>, ScoreMatrix<f64>, Vec<String>) {
        let mut g = TopoGraph::new(Frame::Planar, true);
        for i in 0..3 {
            g.add_node(ObservationNode::planar(i, 0.0, 0.0, 0.0, 0)).unwrap();
        }
        for (a, b) in [(0, 1), (1, 2)] {
            g.add_edge(Edge { src: a, dst: b, distance: 1.0, provenance: Provenance::Learned }).unwrap();
        }
        let m =
            ScoreMatrix::from_rows(vec!["X".into(), "Y".into()], vec![0, 1, 2], vec![vec![0.0, 5.0, 0.0], vec![0.0, 0.0, 5.0]])
                .unwrap();
        (g, m, vec!["X".into(), "Y".into()])
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(8, 3), 120);
        assert_eq!(multisets(1, 3), 1);
        assert_eq!(multisets(5, 0), 1);
    }

    #[test]
    fn finds_path_optimum() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new((-0.1f64).exp()).unwrap();
        let w = brute_force_plan(&g, &m, &lm, 0, &p, BruteForceBudget { max_len: 5, ..Default::default() }).unwrap();
        assert_eq!(w.nodes, vec![0, 1, 2]);
        assert_eq!(w.assignments, vec![1, 2]);
        assert!((w.score - 9.8).abs() < 1e-12);
    }

    #[test]
    fn finds_stay_home_optimum() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new((-6.0f64).exp()).unwrap();
        let w = brute_force_plan(&g, &m, &lm, 0, &p, BruteForceBudget { max_len: 5, ..Default::default() }).unwrap();
        assert_eq!(w.nodes, vec![0]);
        assert_eq!(w.assignments, vec![0, 0]);
        assert_eq!(w.score, 0.0);
    }

    #[test]
    fn refuses_large_enumerations() {
        let mut g = TopoGraph::new(Frame::Planar, false);
        for i in 0..8 {
            g.add_node(ObservationNode::planar(i, 0.0, 0.0, 0.0, 0)).unwrap();
        }
        for a in 0..8 {
            for b in a + 1..8 {
                g.add_edge(Edge { src: a, dst: b, distance: 1.0, provenance: Provenance::Learned }).unwrap();
            }
        }
        let m = ScoreMatrix::from_rows(vec!["X".into()], (0..8).collect(), vec![vec![0.0; 8]]).unwrap();
        let err = brute_force_plan(
            &g,
            &m,
            &["X".into()],
            0,
            &PlannerParams::new(0.9).unwrap(),
            BruteForceBudget { max_len: 8, max_evaluations: 1000 },
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::BudgetExceeded { .. }));
    }
}
