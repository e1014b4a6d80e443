use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{logit_table, PlanError, PlannerParams, Walk};
use crate::graph::{Adjacency, NodeId, OrdScalar, TopoGraph};
use crate::scalar::Scalar;
use crate::scoring::ScoreMatrix;

/// How a DP cell obtained its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Phase 0 at the start node.
    Start,
    /// Matched landmark `phase` at this node, coming from `(phase - 1, node)`.
    Consume,
    /// Arrived over an edge from the node with this dense index, same phase.
    Move(usize),
}

/// `Q(i, v)`: best score of a walk from the start that ends at `v` after
/// matching the first `i` landmarks. `None` stands for minus infinity.
#[derive(Clone, Debug)]
pub struct DpTable<S> {
    ids: Vec<NodeId>,
    q: Vec<Vec<Option<S>>>,
    parent: Vec<Vec<Option<Step>>>,
}

impl<S: Scalar> DpTable<S> {
    pub fn phases(&self) -> usize {
        self.q.len()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn value(&self, phase: usize, node: NodeId) -> Option<S> {
        let k = self.ids.binary_search(&node).ok()?;
        self.q[phase][k]
    }

    pub fn row(&self, phase: usize) -> &[Option<S>] {
        &self.q[phase]
    }

    pub fn step(&self, phase: usize, index: usize) -> Option<Step> {
        self.parent[phase][index]
    }
}

/// Best walk from `start` matching `landmarks` in order.
pub fn plan<S: Scalar>(
    g: &TopoGraph<S>,
    m: &ScoreMatrix<S>,
    landmarks: &[String],
    start: NodeId,
    params: &PlannerParams<S>,
) -> Result<Walk<S>, PlanError> {
    plan_with_table(g, m, landmarks, start, params).map(|(w, _)| w)
}

/// [`plan`], also returning the converged DP table.
pub fn plan_with_table<S: Scalar>(
    g: &TopoGraph<S>,
    m: &ScoreMatrix<S>,
    landmarks: &[String],
    start: NodeId,
    params: &PlannerParams<S>,
) -> Result<(Walk<S>, DpTable<S>), PlanError> {
    let adj = g.adjacency();
    let s = adj.index_of(start).ok_or(PlanError::UnknownStart(start))?;
    let logits = logit_table(&adj, m, landmarks)?;
    let alpha = params.alpha();
    let n = adj.len();

    let mut table = DpTable {
        ids: adj.ids().to_vec(),
        q: vec![vec![None; n]; landmarks.len() + 1],
        parent: vec![vec![None; n]; landmarks.len() + 1],
    };

    // Phase 0: negated shortest travel penalty from the start.
    table.q[0][s] = Some(S::zero());
    table.parent[0][s] = Some(Step::Start);
    relax(&adj, alpha, &mut table.q[0], &mut table.parent[0]);

    for i in 1..=landmarks.len() {
        let (prev, cur) = table.q.split_at_mut(i);
        for v in 0..n {
            if let Some(x) = prev[i - 1][v] {
                cur[0][v] = Some(x + logits[i - 1][v]);
                table.parent[i][v] = Some(Step::Consume);
            }
        }
        if cur[0].iter().all(Option::is_none) {
            return Err(PlanError::Unreachable { phase: i });
        }
        relax(&adj, alpha, &mut cur[0], &mut table.parent[i]);
    }

    let last = landmarks.len();
    let mut dest: Option<(usize, S)> = None;
    for (v, q) in table.q[last].iter().enumerate() {
        if let Some(q) = *q {
            if dest.is_none_or(|(_, best)| q > best) {
                dest = Some((v, q));
            }
        }
    }
    let (dest, _) = dest.ok_or(PlanError::Unreachable { phase: last })?;

    let (nodes, assignments) = backtrack(&table, last, dest);
    let walk = Walk::evaluate(g, m, landmarks, nodes, assignments, params)?;
    Ok((walk, table))
}

/// Max-priority label setting within one phase. Arc costs `alpha * D` are
/// non-negative, so a popped node is final; stale heap entries are skipped.
fn relax<S: Scalar>(adj: &Adjacency<S>, alpha: S, q: &mut [Option<S>], parent: &mut [Option<Step>]) {
    let mut heap: BinaryHeap<(OrdScalar<S>, Reverse<usize>)> =
        q.iter().enumerate().filter_map(|(v, x)| x.map(|x| (OrdScalar(x), Reverse(v)))).collect();
    let mut settled = vec![false; q.len()];
    while let Some((OrdScalar(x), Reverse(v))) = heap.pop() {
        if settled[v] || q[v] != Some(x) {
            continue;
        }
        settled[v] = true;
        for &(w, d) in adj.out(v) {
            if settled[w] {
                continue;
            }
            let cand = x - alpha * d;
            if q[w].is_none_or(|cur| cand > cur) {
                q[w] = Some(cand);
                parent[w] = Some(Step::Move(v));
                heap.push((OrdScalar(cand), Reverse(w)));
            }
        }
    }
}

fn backtrack<S: Scalar>(table: &DpTable<S>, last: usize, dest: usize) -> (Vec<NodeId>, Vec<usize>) {
    let mut rev = vec![dest];
    let mut rev_assign = vec![0usize; last];
    let (mut i, mut v) = (last, dest);
    let guard = (last + 1) * (table.ids.len() + 1);
    for _ in 0..=guard {
        match table.parent[i][v].expect("finite cells have a parent") {
            Step::Start => {
                rev.reverse();
                let k = rev.len();
                let nodes = rev.into_iter().map(|x| table.ids[x]).collect();
                let assignments = rev_assign.into_iter().map(|p| k - 1 - p).collect();
                return (nodes, assignments);
            }
            Step::Consume => {
                rev_assign[i - 1] = rev.len() - 1;
                i -= 1;
            }
            Step::Move(u) => {
                rev.push(u);
                v = u;
            }
        }
    }
    unreachable!("parent links form a cycle");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Frame, ObservationNode, Provenance};

    /// a -> b -> c with unit weights; X peaks at b, Y at c.
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
    fn uniform_logits_stay_put() {
        let (g, _, _) = path_instance();
        let m = ScoreMatrix::from_rows(vec!["X".into()], vec![0, 1, 2], vec![vec![1.0; 3]]).unwrap();
        let w = plan(&g, &m, &["X".into()], 0, &PlannerParams::new(0.95).unwrap()).unwrap();
        assert_eq!(w.nodes, vec![0]);
        assert_eq!(w.assignments, vec![0]);
    }

    #[test]
    fn cheap_travel_follows_landmarks() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new((-0.1f64).exp()).unwrap();
        let w = plan(&g, &m, &lm, 0, &p).unwrap();
        assert_eq!(w.nodes, vec![0, 1, 2]);
        assert_eq!(w.assignments, vec![1, 2]);
        assert!((w.score - 9.8).abs() < 1e-12);
    }

    #[test]
    fn expensive_travel_stays_home() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new((-6.0f64).exp()).unwrap();
        let w = plan(&g, &m, &lm, 0, &p).unwrap();
        assert_eq!(w.nodes, vec![0]);
        assert_eq!(w.assignments, vec![0, 0]);
        assert_eq!(w.score, 0.0);
    }

    #[test]
    fn table_matches_walk_score() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new(0.9).unwrap();
        let (w, t) = plan_with_table(&g, &m, &lm, 0, &p).unwrap();
        let best = t.row(2).iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((best - w.score).abs() < 1e-12);
        assert_eq!(t.value(0, 0), Some(0.0));
        assert!(t.value(0, 2).is_some());
    }

    #[test]
    fn unreachable_nodes_stay_minus_infinity() {
        let (g, m, lm) = path_instance();
        let (_, t) = plan_with_table(&g, &m, &lm, 2, &PlannerParams::new(0.9).unwrap()).unwrap();
        for phase in 0..3 {
            assert_eq!(t.value(phase, 0), None);
            assert_eq!(t.value(phase, 1), None);
        }
    }

    #[test]
    fn input_errors() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new(0.9).unwrap();
        assert_eq!(plan(&g, &m, &lm, 9, &p).unwrap_err(), PlanError::UnknownStart(9));
        assert_eq!(plan(&g, &m, &["Z".into()], 0, &p).unwrap_err(), PlanError::MissingLandmark("Z".into()));
        let narrow = ScoreMatrix::from_rows(vec!["X".into()], vec![0, 1], vec![vec![0.0, 1.0]]).unwrap();
        assert_eq!(plan(&g, &narrow, &["X".into()], 0, &p).unwrap_err(), PlanError::MissingNodeScore(2));
    }

    #[test]
    fn no_landmarks_returns_start() {
        let (g, m, _) = path_instance();
        let w = plan(&g, &m, &[], 1, &PlannerParams::new(0.9).unwrap()).unwrap();
        assert_eq!(w.nodes, vec![1]);
        assert!(w.assignments.is_empty());
    }

    #[test]
    fn revisits_are_allowed() {
        // 0 <-> 1 <-> 2: the first landmark sits at 2, the second back at 0.
        let mut g = TopoGraph::new(Frame::Planar, false);
        for i in 0..3 {
            g.add_node(ObservationNode::planar(i, 0.0, 0.0, 0.0, 0)).unwrap();
        }
        for (a, b) in [(0, 1), (1, 2)] {
            g.add_edge(Edge { src: a, dst: b, distance: 1.0, provenance: Provenance::Learned }).unwrap();
        }
        let m = ScoreMatrix::from_rows(
            vec!["far".into(), "home".into()],
            vec![0, 1, 2],
            vec![vec![0.0, 0.0, 10.0], vec![10.0, 0.0, 0.0]],
        )
        .unwrap();
        let w = plan(&g, &m, &["far".into(), "home".into()], 0, &PlannerParams::new(0.9).unwrap()).unwrap();
        assert_eq!(w.nodes, vec![0, 1, 2, 1, 0]);
        assert_eq!(w.assignments, vec![2, 4]);
    }

    #[test]
    fn f32_planning() {
        let (g, m, lm) = path_instance();
        let g32: TopoGraph<f32> = crate::graph::parse_graph(&crate::graph::render_graph(&g)).unwrap();
        let m32: ScoreMatrix<f32> = crate::scoring::parse_scores(&crate::scoring::render_scores(&m)).unwrap();
        let w = plan(&g32, &m32, &lm, 0, &PlannerParams::new((-0.1f32).exp()).unwrap()).unwrap();
        assert_eq!(w.nodes, vec![0, 1, 2]);
        assert!((w.score - 9.8).abs() < 1e-5);
    }
}
