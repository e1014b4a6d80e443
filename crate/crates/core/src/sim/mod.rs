//! Synthetic worlds, trajectory logs and stochastic walk execution.

mod bench;
mod exec;
mod io;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DistanceEstimator, NodeId, ObservationNode};

pub use bench::{generate_benchmark, shortest_landmark_route, Benchmark, BenchmarkSpec};
pub use exec::{completion_rate, execute_walk, ExecutionTrace, Outcome};
pub use io::{parse_trajectory_log, render_trajectory_log, WORLD_VERSION};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("infeasible world spec: {0}")]
    Infeasible(String),
    #[error("walk is not executable: {0}")]
    InvalidWalk(String),
    #[error("gamma must lie in (0, 1), got {0}")]
    InvalidGamma(f64),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Landmarks used when a spec asks for a count rather than naming them.
pub const DEFAULT_VOCABULARY: &[&str] = &[
    "stop sign",
    "white building",
    "traffic cone",
    "blue dumpster",
    "fire hydrant",
    "glass building",
    "picnic table",
    "street lamp",
    "red car",
    "statue",
    "pink house",
    "library",
    "water tower",
    "white truck",
    "wooden bench",
    "mailbox",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    /// `rows x cols` lattice with 4-neighborhood, `spacing` meters apart.
    Grid { rows: usize, cols: usize, spacing: f64 },
    /// `nodes` points uniform in a `side x side` square, linked within `radius`.
    Geometric { nodes: usize, side: f64, radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub layout: Layout,
    /// Landmark labels; when empty, the first `landmark_count` entries of
    /// [`DEFAULT_VOCABULARY`] are used.
    #[serde(default)]
    pub landmarks: Vec<String>,
    #[serde(default)]
    pub landmark_count: usize,
    /// Distinct nodes carrying each landmark.
    pub placements_per_landmark: usize,
    pub require_connected: bool,
    /// Time-steps needed to cross one world edge.
    pub steps_per_edge: f64,
    /// Seconds between consecutive trajectory records.
    pub dt: f64,
    pub seed: u64,
}

impl WorldSpec {
    pub fn grid(rows: usize, cols: usize, landmark_count: usize, seed: u64) -> Self {
        Self {
            layout: Layout::Grid { rows, cols, spacing: 10.0 },
            landmarks: Vec::new(),
            landmark_count,
            placements_per_landmark: 1,
            require_connected: true,
            steps_per_edge: 4.0,
            dt: 0.5,
            seed,
        }
    }

    fn vocabulary(&self) -> Result<Vec<String>, SimError> {
        if !self.landmarks.is_empty() {
            return Ok(self.landmarks.clone());
        }
        if self.landmark_count > DEFAULT_VOCABULARY.len() {
            return Err(SimError::Infeasible(format!(
                "landmark_count {} exceeds the default vocabulary of {}",
                self.landmark_count,
                DEFAULT_VOCABULARY.len()
            )));
        }
        Ok(DEFAULT_VOCABULARY[..self.landmark_count].iter().map(|s| s.to_string()).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldNode {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

/// Planar world with undirected adjacency and ground-truth landmark placements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticWorld {
    pub version: String,
    pub spec: WorldSpec,
    pub nodes: Vec<WorldNode>,
    /// Undirected edges with `a < b`, sorted.
    pub edges: Vec<(NodeId, NodeId)>,
    pub placements: BTreeMap<String, BTreeSet<NodeId>>,
}

/// One observation per time-step along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub trajectory_id: u64,
    pub timestamp: f64,
    pub x: f64,
    pub y: f64,
    pub node_id: NodeId,
}

impl SyntheticWorld {
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn placements(&self) -> &BTreeMap<String, BTreeSet<NodeId>> {
        &self.placements
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &String> {
        self.placements.keys()
    }

    pub fn carries(&self, node: NodeId, label: &str) -> bool {
        self.placements.get(label).is_some_and(|s| s.contains(&node))
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            let (a, b) = (a as usize, b as usize);
            adj[a].push(b);
            adj[b].push(a);
        }
        adj.iter_mut().for_each(|v| v.sort_unstable());
        adj
    }

    pub fn is_connected(&self) -> bool {
        let hops = bfs(&self.neighbors(), 0);
        hops.iter().all(Option::is_some)
    }

    /// Hop counts between all node pairs; `None` when disconnected.
    pub fn hop_matrix(&self) -> Vec<Vec<Option<u32>>> {
        let adj = self.neighbors();
        (0..self.nodes.len()).map(|s| bfs(&adj, s)).collect()
    }

    /// Ground-truth traversal estimator: hops times steps per edge.
    pub fn distance_estimator(&self) -> HopDistance {
        HopDistance { hops: self.hop_matrix(), steps_per_edge: self.spec.steps_per_edge }
    }

    /// Records grouped by trajectory, converted to graph-building input.
    pub fn observations(records: &[TrajectoryRecord]) -> Vec<Vec<ObservationNode>> {
        let mut by_traj: BTreeMap<u64, Vec<ObservationNode>> = BTreeMap::new();
        for r in records {
            by_traj.entry(r.trajectory_id).or_default().push(ObservationNode::planar(
                r.node_id,
                r.timestamp,
                r.x,
                r.y,
                r.trajectory_id,
            ));
        }
        by_traj.into_values().collect()
    }
}

/// Unreachable pairs get this many steps, far beyond any threshold.
pub const UNREACHABLE_STEPS: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct HopDistance {
    hops: Vec<Vec<Option<u32>>>,
    steps_per_edge: f64,
}

impl DistanceEstimator<f64> for HopDistance {
    fn estimate(&self, from: &ObservationNode, to: &ObservationNode) -> f64 {
        match self.hops[from.id as usize][to.id as usize] {
            Some(h) => f64::from(h) * self.steps_per_edge,
            None => UNREACHABLE_STEPS,
        }
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<Option<u32>> {
    let mut d = vec![None; adj.len()];
    if adj.is_empty() {
        return d;
    }
    d[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        let du = d[u].expect("queued nodes are labeled");
        for &v in &adj[u] {
            if d[v].is_none() {
                d[v] = Some(du + 1);
                q.push_back(v);
            }
        }
    }
    d
}

/// Generates a world and trajectory records covering every node once.
///
/// Trajectories follow a depth-first traversal: a new trajectory starts
/// whenever the next discovered node is not adjacent to the previous one.
/// Trajectories are separated by 1000 s so only consecutive records of the
/// same trajectory fall within typical timestamp thresholds.
pub fn generate_world(spec: &WorldSpec) -> Result<(SyntheticWorld, Vec<TrajectoryRecord>), SimError> {
    if !(spec.steps_per_edge.is_finite() && spec.steps_per_edge > 0.0) {
        return Err(SimError::Infeasible("steps_per_edge must be > 0".into()));
    }
    if !(spec.dt.is_finite() && spec.dt > 0.0) {
        return Err(SimError::Infeasible("dt must be > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (nodes, edges) = match spec.layout {
        Layout::Grid { rows, cols, spacing } => {
            if rows * cols < 2 {
                return Err(SimError::Infeasible("a world needs at least 2 nodes".into()));
            }
            let mut nodes = Vec::new();
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let id = (r * cols + c) as NodeId;
                    nodes.push(WorldNode { id, x: c as f64 * spacing, y: r as f64 * spacing });
                    if c + 1 < cols {
                        edges.push((id, id + 1));
                    }
                    if r + 1 < rows {
                        edges.push((id, id + cols as NodeId));
                    }
                }
            }
            (nodes, edges)
        }
        Layout::Geometric { nodes: n, side, radius } => {
            if n < 2 {
                return Err(SimError::Infeasible("a world needs at least 2 nodes".into()));
            }
            if !(side > 0.0 && radius > 0.0) {
                return Err(SimError::Infeasible("side and radius must be > 0".into()));
            }
            let nodes: Vec<WorldNode> = (0..n)
                .map(|i| WorldNode { id: i as NodeId, x: rng.random_range(0.0..side), y: rng.random_range(0.0..side) })
                .collect();
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if (nodes[a].x - nodes[b].x).hypot(nodes[a].y - nodes[b].y) <= radius {
                        edges.push((a as NodeId, b as NodeId));
                    }
                }
            }
            (nodes, edges)
        }
    };

    let vocabulary = spec.vocabulary()?;
    let needed = vocabulary.len() * spec.placements_per_landmark;
    if needed > nodes.len() {
        return Err(SimError::Infeasible(format!("{needed} landmark placements do not fit on {} nodes", nodes.len())));
    }
    let mut world =
        SyntheticWorld { version: WORLD_VERSION.to_string(), spec: spec.clone(), nodes, edges, placements: BTreeMap::new() };
    if spec.require_connected && !world.is_connected() {
        return Err(SimError::Infeasible("layout is not connected; raise the density or radius".into()));
    }

    let ids: Vec<NodeId> = world.node_ids().collect();
    let chosen: Vec<NodeId> = ids.choose_multiple(&mut rng, needed).copied().collect();
    for (k, label) in vocabulary.iter().enumerate() {
        let set = chosen[k * spec.placements_per_landmark..(k + 1) * spec.placements_per_landmark].iter().copied();
        world.placements.insert(label.clone(), set.collect());
    }

    let records = trajectories(&world, &mut rng);
    Ok((world, records))
}

fn trajectories(world: &SyntheticWorld, rng: &mut ChaCha8Rng) -> Vec<TrajectoryRecord> {
    let adj = world.neighbors();
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut roots: Vec<usize> = (0..n).collect();
    roots.shuffle(rng);
    for root in roots {
        if visited[root] {
            continue;
        }
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            if visited[u] {
                continue;
            }
            visited[u] = true;
            order.push(u);
            for &v in adj[u].iter().rev() {
                if !visited[v] {
                    stack.push(v);
                }
            }
        }
    }

    let mut out = Vec::with_capacity(n);
    let mut traj = 0u64;
    let mut t = 0.0;
    for (k, &u) in order.iter().enumerate() {
        if k > 0 {
            if adj[order[k - 1]].binary_search(&u).is_ok() {
                t += world.spec.dt;
            } else {
                traj += 1;
                t = 1000.0 * traj as f64;
            }
        }
        let node = world.nodes[u];
        out.push(TrajectoryRecord { trajectory_id: traj, timestamp: t, x: node.x, y: node.y, node_id: node.id });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, GraphBuildParams, TopoGraph};

    #[test]
    fn grid_world_is_deterministic() {
        let spec = WorldSpec::grid(5, 5, 4, 7);
        let a = generate_world(&spec).unwrap();
        let b = generate_world(&spec).unwrap();
        assert_eq!(serde_json::to_string(&a.0).unwrap(), serde_json::to_string(&b.0).unwrap());
        assert_eq!(render_trajectory_log(&a.1), render_trajectory_log(&b.1));
        assert_eq!(a.0.placements.len(), 4);
        assert_eq!(a.1.len(), 25);
    }

    #[test]
    fn sparse_geometric_world_rejected_when_connectivity_required() {
        let spec =
            WorldSpec { layout: Layout::Geometric { nodes: 30, side: 1000.0, radius: 5.0 }, ..WorldSpec::grid(1, 1, 1, 3) };
        assert!(matches!(generate_world(&spec), Err(SimError::Infeasible(_))));
        let relaxed = WorldSpec { require_connected: false, ..spec };
        assert!(generate_world(&relaxed).is_ok());
    }

    #[test]
    fn too_many_placements_rejected() {
        let spec = WorldSpec { placements_per_landmark: 5, ..WorldSpec::grid(2, 2, 2, 0) };
        assert!(matches!(generate_world(&spec), Err(SimError::Infeasible(_))));
    }

    #[test]
    fn built_graph_reproduces_world_edges() {
        for seed in 0..3 {
            let spec =
                WorldSpec { layout: Layout::Geometric { nodes: 40, side: 60.0, radius: 15.0 }, ..WorldSpec::grid(1, 1, 2, seed) };
            let (world, records) = match generate_world(&spec) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let g: TopoGraph<f64> =
                build_graph(&SyntheticWorld::observations(&records), &world.distance_estimator(), &GraphBuildParams::default())
                    .unwrap();
            let mut got: Vec<(NodeId, NodeId)> = g.edges().map(|e| (e.src, e.dst)).collect();
            got.sort_unstable();
            let mut want: Vec<(NodeId, NodeId)> = world.edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
            want.sort_unstable();
            assert_eq!(got, want, "seed {seed}");
        }
    }
}
