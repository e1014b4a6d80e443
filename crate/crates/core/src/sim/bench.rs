use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{generate_world, SimError, SyntheticWorld, TrajectoryRecord, WorldSpec};
use crate::eval::{EvalSuite, Placements, QueryCase, RouteLength};
use crate::graph::{build_graph, GraphBuildParams, NodeId, OrdScalar, TopoGraph};
use crate::parsing::{Instruction, LandmarkList};
use crate::scalar::Scalar;
use crate::scoring::{synthetic_scores, NoiseSpec, ScoreMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub name: String,
    pub world: WorldSpec,
    pub noise: NoiseSpec,
    pub queries: usize,
    pub landmarks_per_query: usize,
    /// Each next landmark is drawn among this many nearest unused ones.
    pub nearby: usize,
    pub score_seed: u64,
    pub query_seed: u64,
}

impl BenchmarkSpec {
    /// About 25 nodes, 10 queries.
    pub fn small(seed: u64) -> Self {
        Self::preset("small", 5, 4, 2, seed)
    }

    /// About 200 nodes, 10 queries.
    pub fn large(seed: u64) -> Self {
        Self::preset("large", 14, 12, 3, seed)
    }

    fn preset(name: &str, side: usize, landmarks: usize, placements: usize, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            world: WorldSpec { placements_per_landmark: placements, ..WorldSpec::grid(side, side, landmarks, seed) },
            noise: NoiseSpec { false_positive_rate: 0.02, ..NoiseSpec::default() },
            queries: 10,
            landmarks_per_query: 2,
            nearby: 2,
            score_seed: seed.wrapping_add(1),
            query_seed: seed.wrapping_add(2),
        }
    }
}

/// A world with its trajectories, built graph, scores and query suite.
#[derive(Clone, Debug)]
pub struct Benchmark {
    pub spec: BenchmarkSpec,
    pub world: SyntheticWorld,
    pub records: Vec<TrajectoryRecord>,
    pub graph: TopoGraph<f64>,
    pub scores: ScoreMatrix<f64>,
    pub suite: EvalSuite,
}

pub fn generate_benchmark(spec: &BenchmarkSpec) -> Result<Benchmark, SimError> {
    let (world, records) = generate_world(&spec.world)?;
    let graph = build_graph(&SyntheticWorld::observations(&records), &world.distance_estimator(), &GraphBuildParams::default())
        .map_err(|e| SimError::Infeasible(format!("graph build failed: {e}")))?;
    let labels: Vec<String> = world.vocabulary().cloned().collect();
    let scores = synthetic_scores(&world, &labels, &spec.noise, spec.score_seed)
        .map_err(|e| SimError::Infeasible(format!("scoring failed: {e}")))?;
    if spec.landmarks_per_query == 0 || spec.landmarks_per_query > labels.len() || spec.nearby == 0 {
        return Err(SimError::Infeasible(format!(
            "cannot draw {} landmarks per query from {} (nearby {})",
            spec.landmarks_per_query,
            labels.len(),
            spec.nearby
        )));
    }

    let hops = world.hop_matrix();
    let ids: Vec<NodeId> = world.node_ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.query_seed);
    let mut cases = Vec::with_capacity(spec.queries);
    for q in 0..spec.queries {
        let start = ids[rng.random_range(0..ids.len())];
        let mut at = start;
        let mut chosen: Vec<String> = Vec::new();
        for _ in 0..spec.landmarks_per_query {
            let mut cands: Vec<(u32, &String, NodeId)> = labels
                .iter()
                .filter(|l| !chosen.contains(l) && !world.carries(at, l))
                .filter_map(|l| {
                    world.placements[l].iter().filter_map(|&v| hops[at as usize][v as usize].map(|h| (h, l, v))).min()
                })
                .collect();
            cands.sort();
            let &(_, l, v) = cands[..spec.nearby.min(cands.len())]
                .choose(&mut rng)
                .ok_or_else(|| SimError::Infeasible(format!("query {q}: no reachable landmark left")))?;
            chosen.push(l.clone());
            at = v;
        }
        let (route, cost) = shortest_landmark_route(&graph, start, &chosen, &world.placements)
            .ok_or_else(|| SimError::Infeasible(format!("query {q}: landmarks unreachable in the built graph")))?;
        cases.push(QueryCase {
            id: format!("{}-{q:02}", spec.name),
            instruction: Instruction::new(describe(&chosen)).expect("non-empty text"),
            ground_truth_landmarks: LandmarkList::new(chosen).expect("non-empty landmarks"),
            ground_truth_route: route,
            described_route_length: RouteLength::time_steps(cost),
            start,
        });
    }
    Ok(Benchmark { spec: spec.clone(), suite: EvalSuite::new(spec.name.clone(), cases), world, records, graph, scores })
}

fn describe(landmarks: &[String]) -> String {
    match landmarks {
        [only] => format!("Go to the {only}."),
        [first, mid @ .., last] => {
            let mut s = format!("Walk past the {first}");
            for m in mid {
                s += &format!(", then the {m}");
            }
            s + &format!(" and stop at the {last}.")
        }
        [] => unreachable!("queries have landmarks"),
    }
}

/// Cheapest walk from `start` visiting a carrier of each landmark in order.
///
/// Returns the node sequence and its traversal cost; ties resolve toward
/// lower node ids.
pub fn shortest_landmark_route<S: Scalar>(
    g: &TopoGraph<S>,
    start: NodeId,
    landmarks: &[String],
    placements: &Placements,
) -> Option<(Vec<NodeId>, S)> {
    let adj = g.adjacency();
    let n = adj.len();
    let k = landmarks.len();
    let carriers: Vec<&BTreeSet<NodeId>> = landmarks.iter().map(|l| placements.get(l)).collect::<Option<_>>()?;
    let s = adj.index_of(start)?;
    let state = |phase: usize, v: usize| phase * n + v;
    let mut dist: Vec<Option<S>> = vec![None; (k + 1) * n];
    let mut parent: Vec<Option<usize>> = vec![None; (k + 1) * n];
    let mut done = vec![false; (k + 1) * n];
    let mut heap = BinaryHeap::new();
    dist[state(0, s)] = Some(S::zero());
    heap.push(Reverse((OrdScalar(S::zero()), 0usize, s)));
    while let Some(Reverse((OrdScalar(d), phase, v))) = heap.pop() {
        let sv = state(phase, v);
        if done[sv] {
            continue;
        }
        done[sv] = true;
        if phase == k {
            let mut nodes = Vec::new();
            let mut cur = Some(sv);
            while let Some(c) = cur {
                let id = adj.id(c % n);
                if nodes.last() != Some(&id) {
                    nodes.push(id);
                }
                cur = parent[c];
            }
            nodes.reverse();
            return Some((nodes, d));
        }
        let mut push = |to: usize, nd: S, np: usize, nv: usize| {
            if !done[to] && dist[to].is_none_or(|cur| nd < cur) {
                dist[to] = Some(nd);
                parent[to] = Some(sv);
                heap.push(Reverse((OrdScalar(nd), np, nv)));
            }
        };
        if carriers[phase].contains(&adj.id(v)) {
            push(state(phase + 1, v), d, phase + 1, v);
        }
        for &(u, w) in adj.out(v) {
            push(state(phase, u), d + w, phase, u);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Frame, ObservationNode, Provenance};

    #[test]
    fn route_visits_in_order() {
        let mut g = TopoGraph::new(Frame::Planar, false);
        for i in 0..5 {
            g.add_node(ObservationNode::planar(i, i as f64, 0.0, 0.0, 0)).unwrap();
        }
        for i in 0..4 {
            g.add_edge(Edge { src: i, dst: i + 1, distance: 1.0, provenance: Provenance::Learned }).unwrap();
        }
        let mut p = Placements::new();
        p.insert("a".into(), [3].into());
        p.insert("b".into(), [1].into());
        let (route, cost) = shortest_landmark_route(&g, 2, &["a".into(), "b".into()], &p).unwrap();
        assert_eq!(route, vec![2, 3, 2, 1]);
        assert_eq!(cost, 3.0);
        let (route, cost) = shortest_landmark_route(&g, 2, &["b".into(), "b".into()], &p).unwrap();
        assert_eq!((route, cost), (vec![2, 1], 1.0));
    }

    #[test]
    fn benchmarks_are_deterministic_and_valid() {
        for spec in [BenchmarkSpec::small(11), BenchmarkSpec::large(11)] {
            let a = generate_benchmark(&spec).unwrap();
            let b = generate_benchmark(&spec).unwrap();
            assert_eq!(a.suite, b.suite);
            assert_eq!(a.scores, b.scores);
            assert_eq!(a.suite.cases.len(), 10);
            for c in &a.suite.cases {
                c.validate(&a.graph).unwrap();
            }
        }
    }
}
