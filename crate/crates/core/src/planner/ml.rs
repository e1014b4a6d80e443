use super::{logit_table, PlanError, PlannerParams, Walk};
use crate::graph::{Adjacency, NodeId, TopoGraph};
use crate::scalar::Scalar;
use crate::scoring::ScoreMatrix;

/// All-pairs shortest distances with next-hop reconstruction.
#[derive(Clone, Debug)]
pub struct AllPairs<S> {
    n: usize,
    dist: Vec<Option<S>>,
    next: Vec<Option<usize>>,
}

impl<S: Scalar> AllPairs<S> {
    pub fn distance(&self, from: usize, to: usize) -> Option<S> {
        self.dist[from * self.n + to]
    }

    /// Dense indices of a shortest path, both endpoints included.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        self.distance(from, to)?;
        let mut out = vec![from];
        let mut cur = from;
        while cur != to {
            cur = self.next[cur * self.n + to]?;
            out.push(cur);
        }
        Some(out)
    }
}

/// Floyd–Warshall over an adjacency view. Weights must be non-negative.
pub fn floyd_warshall<S: Scalar>(adj: &Adjacency<S>) -> AllPairs<S> {
    let n = adj.len();
    let mut dist = vec![None; n * n];
    let mut next = vec![None; n * n];
    for u in 0..n {
        dist[u * n + u] = Some(S::zero());
        next[u * n + u] = Some(u);
        for &(v, w) in adj.out(u) {
            if dist[u * n + v].is_none_or(|cur| w < cur) {
                dist[u * n + v] = Some(w);
                next[u * n + v] = Some(v);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i * n + k] else { continue };
            for j in 0..n {
                let Some(kj) = dist[k * n + j] else { continue };
                let through = ik + kj;
                if dist[i * n + j].is_none_or(|cur| through < cur) {
                    dist[i * n + j] = Some(through);
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    AllPairs { n, dist, next }
}

/// Cost-blind baseline: each landmark goes to its highest-logit node (lowest
/// id on ties), and consecutive targets are joined by shortest paths.
pub fn plan_max_likelihood<S: Scalar>(
    g: &TopoGraph<S>,
    m: &ScoreMatrix<S>,
    landmarks: &[String],
    start: NodeId,
    params: &PlannerParams<S>,
) -> Result<Walk<S>, PlanError> {
    let adj = g.adjacency();
    let s = adj.index_of(start).ok_or(PlanError::UnknownStart(start))?;
    let logits = logit_table(&adj, m, landmarks)?;
    let apsp = floyd_warshall(&adj);

    let mut nodes = vec![s];
    let mut assignments = Vec::with_capacity(landmarks.len());
    for (label, row) in landmarks.iter().zip(&logits) {
        let mut target = 0;
        for (v, &x) in row.iter().enumerate() {
            if x > row[target] {
                target = v;
            }
        }
        let here = *nodes.last().expect("walk starts at the start node");
        let segment = apsp.path(here, target).ok_or_else(|| PlanError::UnreachableTarget {
            landmark: label.clone(),
            target: adj.id(target),
            from: adj.id(here),
        })?;
        nodes.extend_from_slice(&segment[1..]);
        assignments.push(nodes.len() - 1);
    }
    let nodes = nodes.into_iter().map(|v| adj.id(v)).collect();
    Walk::evaluate(g, m, landmarks, nodes, assignments, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{shortest_distances, Edge, Frame, ObservationNode, Provenance};
    use crate::planner::plan;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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
    fn ml_ignores_cost() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new((-6.0f64).exp()).unwrap();
        let ml = plan_max_likelihood(&g, &m, &lm, 0, &p).unwrap();
        assert_eq!(ml.nodes, vec![0, 1, 2]);
        assert_eq!(ml.assignments, vec![1, 2]);
        assert!((ml.score - (-2.0)).abs() < 1e-12);
        let dp = plan(&g, &m, &lm, 0, &p).unwrap();
        assert!(dp.score > ml.score);
    }

    #[test]
    fn ml_agrees_with_dp_when_argmaxes_are_cheap() {
        let (g, m, lm) = path_instance();
        let p = PlannerParams::new((-0.1f64).exp()).unwrap();
        let ml = plan_max_likelihood(&g, &m, &lm, 0, &p).unwrap();
        let dp = plan(&g, &m, &lm, 0, &p).unwrap();
        assert_eq!(ml.nodes, dp.nodes);
        assert_eq!(ml.score, dp.score);
    }

    #[test]
    fn ties_pick_lowest_node_and_repeat_targets_share_position() {
        let (g, _, _) = path_instance();
        let m =
            ScoreMatrix::from_rows(vec!["X".into(), "Y".into()], vec![2, 1, 0], vec![vec![3.0, 3.0, 0.0], vec![3.0, 3.0, 0.0]])
                .unwrap();
        let w = plan_max_likelihood(&g, &m, &["X".into(), "Y".into()], 0, &PlannerParams::new(0.9).unwrap()).unwrap();
        assert_eq!(w.nodes, vec![0, 1]);
        assert_eq!(w.assignments, vec![1, 1]);
    }

    #[test]
    fn unreachable_target_names_landmark() {
        let (g, m, lm) = path_instance();
        let err = plan_max_likelihood(&g, &m, &lm, 2, &PlannerParams::new(0.9).unwrap()).unwrap_err();
        assert_eq!(err, PlanError::UnreachableTarget { landmark: "X".into(), target: 1, from: 2 });
    }

    #[test]
    fn floyd_warshall_matches_dijkstra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..15u64);
            let mut g = TopoGraph::new(Frame::Planar, true);
            for i in 0..n {
                g.add_node(ObservationNode::planar(i, 0.0, 0.0, 0.0, 0)).unwrap();
            }
            for a in 0..n {
                for b in 0..n {
                    if a != b && rng.random_bool(0.3) {
                        let w: f64 = rng.random_range(0.0..5.0);
                        g.add_edge(Edge { src: a, dst: b, distance: w, provenance: Provenance::Learned }).unwrap();
                    }
                }
            }
            let adj = g.adjacency();
            let apsp = floyd_warshall(&adj);
            for s in 0..adj.len() {
                let d = shortest_distances(&adj, s);
                for t in 0..adj.len() {
                    match (d[t], apsp.distance(s, t)) {
                        (None, None) => assert!(apsp.path(s, t).is_none()),
                        (Some(a), Some(b)) => {
                            assert!((a - b).abs() < 1e-9);
                            let p = apsp.path(s, t).unwrap();
                            let len: f64 = p.windows(2).map(|w| adj.weight(w[0], w[1]).unwrap()).sum();
                            assert!((len - b).abs() < 1e-9);
                        }
                        other => panic!("{other:?}"),
                    }
                }
            }
        }
    }
}
