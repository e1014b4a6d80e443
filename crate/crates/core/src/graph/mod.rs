//! Topological graph of robot observations.
//!
//! Nodes are observations recorded along trajectories; a directed edge carries
//! the estimated number of time-steps needed to drive from its source to its
//! destination.

mod build;
mod io;
mod reduce;
mod spatial;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use build::{build_graph, edge_predicate, DistanceEstimator, GraphBuildParams};
pub use io::{load_graph, parse_graph, render_graph, save_graph, GRAPH_VERSION};
pub use reduce::{reduce_graph, ReductionStats};
pub use spatial::{spatial_distance, EARTH_RADIUS_M};

pub type NodeId = u64;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("edge {0} -> {0} is a self loop")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge {src} -> {dst} has invalid distance {value}")]
    InvalidDistance { src: NodeId, dst: NodeId, value: f64 },
    #[error("trajectory {trajectory} record {record}: {reason}")]
    InvalidRecord { trajectory: usize, record: usize, reason: String },
    #[error("position frames differ ({0:?} vs {1:?})")]
    FrameMismatch(Frame, Frame),
    #[error("node {0} has no position")]
    MissingPosition(NodeId),
    #[error("invalid build parameters: {0}")]
    InvalidParams(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coordinate frame of node positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Planar,
    Geodetic,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Planar => "planar",
            Frame::Geodetic => "geodetic",
        }
    }
}

/// Planar coordinates are meters; geodetic coordinates are degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "frame", rename_all = "lowercase")]
pub enum Position {
    Planar { x: f64, y: f64 },
    Geodetic { lat: f64, lon: f64 },
}

impl Position {
    pub fn frame(&self) -> Frame {
        match self {
            Position::Planar { .. } => Frame::Planar,
            Position::Geodetic { .. } => Frame::Geodetic,
        }
    }

    pub fn coords(&self) -> (f64, f64) {
        match *self {
            Position::Planar { x, y } => (x, y),
            Position::Geodetic { lat, lon } => (lat, lon),
        }
    }

    pub fn new(frame: Frame, a: f64, b: f64) -> Self {
        match frame {
            Frame::Planar => Position::Planar { x: a, y: b },
            Frame::Geodetic => Position::Geodetic { lat: a, lon: b },
        }
    }

    pub fn is_finite(&self) -> bool {
        let (a, b) = self.coords();
        a.is_finite() && b.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservationNode {
    pub id: NodeId,
    /// Seconds since the trajectory epoch.
    pub timestamp: f64,
    pub position: Option<Position>,
    pub image_ref: Option<String>,
    pub trajectory_id: u64,
}

impl ObservationNode {
    pub fn planar(id: NodeId, timestamp: f64, x: f64, y: f64, trajectory_id: u64) -> Self {
        Self { id, timestamp, position: Some(Position::Planar { x, y }), image_ref: None, trajectory_id }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Temporal,
    Learned,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Temporal => "temporal",
            Provenance::Learned => "learned",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<S> {
    pub src: NodeId,
    pub dst: NodeId,
    /// Estimated traversal time-steps.
    pub distance: S,
    pub provenance: Provenance,
}

/// Directed (or symmetrized) weighted graph of observations.
///
/// Nodes are kept sorted by id and edges by `(src, dst)`, which makes every
/// iteration order, and therefore every serialized form, deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct TopoGraph<S> {
    frame: Frame,
    directed: bool,
    nodes: BTreeMap<NodeId, ObservationNode>,
    edges: BTreeMap<(NodeId, NodeId), Edge<S>>,
}

impl<S: Scalar> TopoGraph<S> {
    pub fn new(frame: Frame, directed: bool) -> Self {
        Self { frame, directed, nodes: BTreeMap::new(), edges: BTreeMap::new() }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn set_directed(&mut self, directed: bool) {
        self.directed = directed;
    }

    pub fn add_node(&mut self, node: ObservationNode) -> Result<(), GraphError> {
        if !node.timestamp.is_finite() || node.timestamp < 0.0 {
            return Err(GraphError::InvalidRecord {
                trajectory: node.trajectory_id as usize,
                record: node.id as usize,
                reason: format!("timestamp {} must be finite and non-negative", node.timestamp),
            });
        }
        if let Some(p) = &node.position {
            if p.frame() != self.frame {
                return Err(GraphError::FrameMismatch(self.frame, p.frame()));
            }
            if !p.is_finite() {
                return Err(GraphError::InvalidRecord {
                    trajectory: node.trajectory_id as usize,
                    record: node.id as usize,
                    reason: "non-finite position".into(),
                });
            }
        }
        if self.nodes.contains_key(&node.id) {
            return Err(GraphError::DuplicateNode(node.id));
        }
        self.nodes.insert(node.id, node);
        Ok(())
    }

    pub fn add_edge(&mut self, edge: Edge<S>) -> Result<(), GraphError> {
        if edge.src == edge.dst {
            return Err(GraphError::SelfLoop(edge.src));
        }
        for id in [edge.src, edge.dst] {
            if !self.nodes.contains_key(&id) {
                return Err(GraphError::UnknownNode(id));
            }
        }
        if !edge.distance.is_finite() || edge.distance < S::zero() {
            return Err(GraphError::InvalidDistance { src: edge.src, dst: edge.dst, value: edge.distance.to_f64_lossless() });
        }
        if self.edges.contains_key(&(edge.src, edge.dst)) {
            return Err(GraphError::DuplicateEdge(edge.src, edge.dst));
        }
        self.edges.insert((edge.src, edge.dst), edge);
        Ok(())
    }

    pub(crate) fn remove_edge(&mut self, src: NodeId, dst: NodeId) -> Option<Edge<S>> {
        self.edges.remove(&(src, dst))
    }

    pub fn node(&self, id: NodeId) -> Option<&ObservationNode> {
        self.nodes.get(&id)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &ObservationNode> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge<S>> {
        self.edges.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Weight of the traversable connection `src -> dst`, honoring the
    /// directedness flag. When both directions are stored in an undirected
    /// graph the lighter one wins.
    pub fn distance(&self, src: NodeId, dst: NodeId) -> Option<S> {
        let fwd = self.edges.get(&(src, dst)).map(|e| e.distance);
        if self.directed {
            return fwd;
        }
        let bwd = self.edges.get(&(dst, src)).map(|e| e.distance);
        match (fwd, bwd) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn adjacency(&self) -> Adjacency<S> {
        Adjacency::new(self)
    }
}

/// Dense index-based view of a graph used by the search routines.
#[derive(Clone, Debug)]
pub struct Adjacency<S> {
    ids: Vec<NodeId>,
    out: Vec<Vec<(usize, S)>>,
    inc: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> Adjacency<S> {
    fn new(g: &TopoGraph<S>) -> Self {
        let ids: Vec<NodeId> = g.node_ids().collect();
        let n = ids.len();
        let idx = |id: NodeId| ids.binary_search(&id).expect("edge endpoint indexed");
        let mut arcs: BTreeMap<(usize, usize), S> = BTreeMap::new();
        let mut put = |a: usize, b: usize, w: S| {
            arcs.entry((a, b)).and_modify(|cur| *cur = cur.min(w)).or_insert(w);
        };
        for e in g.edges() {
            let (a, b) = (idx(e.src), idx(e.dst));
            put(a, b, e.distance);
            if !g.is_directed() {
                put(b, a, e.distance);
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (&(a, b), &w) in &arcs {
            out[a].push((b, w));
            inc[b].push((a, w));
        }
        Self { ids, out, inc }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> NodeId {
        self.ids[index]
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    /// Out-arcs of `index`, sorted by target index.
    pub fn out(&self, index: usize) -> &[(usize, S)] {
        &self.out[index]
    }

    /// In-arcs of `index`, sorted by source index.
    pub fn inc(&self, index: usize) -> &[(usize, S)] {
        &self.inc[index]
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<S> {
        self.out[a].binary_search_by_key(&b, |&(t, _)| t).ok().map(|k| self.out[a][k].1)
    }
}

/// Single-source shortest distances over an adjacency view; `None` marks unreachable.
pub fn shortest_distances<S: Scalar>(adj: &Adjacency<S>, source: usize) -> Vec<Option<S>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut dist: Vec<Option<S>> = vec![None; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(S::zero());
    heap.push(Reverse((OrdScalar(S::zero()), source)));
    while let Some(Reverse((OrdScalar(d), u))) = heap.pop() {
        if dist[u].is_some_and(|cur| d > cur) {
            continue;
        }
        for &(v, w) in adj.out(u) {
            let nd = d + w;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((OrdScalar(nd), v)));
            }
        }
    }
    dist
}

/// Total order over finite scalars for heap keys.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct OrdScalar<S>(pub S);

impl<S: Scalar> Eq for OrdScalar<S> {}

impl<S: Scalar> PartialOrd for OrdScalar<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for OrdScalar<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).expect("heap keys are never NaN")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: u64) -> TopoGraph<f64> {
        let mut g = TopoGraph::new(Frame::Planar, true);
        for i in 0..n {
            g.add_node(ObservationNode::planar(i, i as f64, i as f64, 0.0, 0)).unwrap();
        }
        g
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = line(3);
        let e = |src, dst, distance| Edge { src, dst, distance, provenance: Provenance::Learned };
        assert!(matches!(g.add_edge(e(0, 0, 1.0)), Err(GraphError::SelfLoop(0))));
        assert!(matches!(g.add_edge(e(0, 9, 1.0)), Err(GraphError::UnknownNode(9))));
        assert!(matches!(g.add_edge(e(0, 1, -1.0)), Err(GraphError::InvalidDistance { .. })));
        assert!(matches!(g.add_edge(e(0, 1, f64::NAN)), Err(GraphError::InvalidDistance { .. })));
        g.add_edge(e(0, 1, 1.0)).unwrap();
        assert!(matches!(g.add_edge(e(0, 1, 2.0)), Err(GraphError::DuplicateEdge(0, 1))));
    }

    #[test]
    fn rejects_duplicate_and_mixed_frame_nodes() {
        let mut g = line(2);
        assert!(matches!(g.add_node(ObservationNode::planar(1, 0.0, 0.0, 0.0, 0)), Err(GraphError::DuplicateNode(1))));
        let geo = ObservationNode {
            id: 7,
            timestamp: 0.0,
            position: Some(Position::Geodetic { lat: 0.0, lon: 0.0 }),
            image_ref: None,
            trajectory_id: 0,
        };
        assert!(matches!(g.add_node(geo), Err(GraphError::FrameMismatch(..))));
    }

    #[test]
    fn undirected_view_is_symmetric() {
        let mut g = line(3);
        g.add_edge(Edge { src: 0, dst: 1, distance: 2.0, provenance: Provenance::Temporal }).unwrap();
        g.add_edge(Edge { src: 1, dst: 0, distance: 1.0, provenance: Provenance::Temporal }).unwrap();
        assert_eq!(g.distance(0, 1), Some(2.0));
        g.set_directed(false);
        assert_eq!(g.distance(0, 1), Some(1.0));
        let adj = g.adjacency();
        assert_eq!(adj.out(0), &[(1, 1.0)]);
        assert_eq!(adj.inc(0), &[(1, 1.0)]);
    }

    #[test]
    fn shortest_distances_on_line() {
        let mut g = line(4);
        for i in 0..3 {
            g.add_edge(Edge { src: i, dst: i + 1, distance: 1.5, provenance: Provenance::Temporal }).unwrap();
        }
        let d = shortest_distances(&g.adjacency(), 1);
        assert_eq!(d, vec![None, Some(0.0), Some(1.5), Some(3.0)]);
    }
}
