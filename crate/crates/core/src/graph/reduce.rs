use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Edge, NodeId, OrdScalar, TopoGraph};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReductionStats {
    pub before: usize,
    pub removed: usize,
}

impl ReductionStats {
    pub fn after(&self) -> usize {
        self.before - self.removed
    }
}

#[derive(Clone, Copy)]
struct Arc<S> {
    to: usize,
    weight: S,
    edge: usize,
}

/// Weighted transitive reduction.
///
/// A stored edge `u -> v` of weight `w` is dropped when some other `u -> v`
/// path of total weight `<= w + slack` survives. Reachability is always
/// preserved, and with zero slack so are all shortest-path distances.
pub fn reduce_graph<S: Scalar>(g: &TopoGraph<S>, slack: S) -> (TopoGraph<S>, ReductionStats) {
    let ids: Vec<_> = g.node_ids().collect();
    let idx = |id| ids.binary_search(&id).expect("edge endpoint indexed");
    let edges: Vec<_> = g.edges().copied().collect();

    let mut arcs: Vec<Vec<Arc<S>>> = vec![Vec::new(); ids.len()];
    for (k, e) in edges.iter().enumerate() {
        let (a, b) = (idx(e.src), idx(e.dst));
        arcs[a].push(Arc { to: b, weight: e.distance, edge: k });
        if !g.is_directed() {
            arcs[b].push(Arc { to: a, weight: e.distance, edge: k });
        }
    }

    let all_positive = edges.iter().all(|e| e.distance > S::zero());
    let removed = if slack == S::zero() && all_positive {
        dominated_positive(&arcs, &edges, ids.len())
    } else {
        sequential(&arcs, &edges, slack, &idx)
    };

    let mut out = g.clone();
    let mut stats = ReductionStats { before: edges.len(), removed: 0 };
    for (k, e) in edges.iter().enumerate() {
        if removed[k] {
            out.remove_edge(e.src, e.dst);
            stats.removed += 1;
        }
    }
    (out, stats)
}

/// Exact dominance test for positive weights and zero slack.
///
/// `u -> v` is dominated iff some in-arc `x -> v` with `x != u` has
/// `dist(u, x) + w(x, v) <= w(u, v)`. A shortest `u -> x` path cannot use
/// `u -> v` itself without already exceeding `w(u, v)`. Every arc on a
/// dominating path is strictly lighter than the edge it replaces, so all
/// dominated edges can be dropped at once without changing any distance.
fn dominated_positive<S: Scalar>(arcs: &[Vec<Arc<S>>], edges: &[Edge<S>], n: usize) -> Vec<bool> {
    let mut inc: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
    for (x, out) in arcs.iter().enumerate() {
        for a in out {
            inc[a.to].push((x, a.weight));
        }
    }
    let mut removed = vec![false; edges.len()];
    for (u, out) in arcs.iter().enumerate() {
        if out.is_empty() {
            continue;
        }
        let dist = plain_distances(arcs, u);
        for arc in out {
            let bound = arc.weight;
            let dominated = inc[arc.to].iter().any(|&(x, w)| x != u && dist[x].is_some_and(|d| d + w <= bound));
            if dominated {
                removed[arc.edge] = true;
            }
        }
    }
    removed
}

/// Screens with two-label distances, then removes candidates one at a time
/// against the current graph, heaviest first, so reachability is kept.
fn sequential<S: Scalar>(arcs: &[Vec<Arc<S>>], edges: &[Edge<S>], slack: S, idx: &impl Fn(NodeId) -> usize) -> Vec<bool> {
    // The screen runs on the original graph. It can only over-report
    // dominated edges, never miss one.
    let mut candidates = vec![false; edges.len()];
    for (u, out) in arcs.iter().enumerate() {
        if out.is_empty() {
            continue;
        }
        let best = two_label_distances(arcs, u);
        for arc in out {
            let alt = best[arc.to].iter().flatten().find(|&&(_, label)| label != arc.edge).map(|&(d, _)| d);
            if alt.is_some_and(|d| d <= arc.weight + slack) {
                candidates[arc.edge] = true;
            }
        }
    }
    let mut order: Vec<usize> = (0..edges.len()).filter(|&k| candidates[k]).collect();
    order.sort_by(|&a, &b| {
        edges[b]
            .distance
            .partial_cmp(&edges[a].distance)
            .expect("finite weights")
            .then((edges[a].src, edges[a].dst).cmp(&(edges[b].src, edges[b].dst)))
    });
    let mut removed = vec![false; edges.len()];
    for k in order {
        let e = &edges[k];
        let limit = e.distance + slack;
        if bounded_distance(arcs, &removed, idx(e.src), idx(e.dst), k, limit).is_some() {
            removed[k] = true;
        }
    }
    removed
}

fn plain_distances<S: Scalar>(arcs: &[Vec<Arc<S>>], source: usize) -> Vec<Option<S>> {
    let mut dist: Vec<Option<S>> = vec![None; arcs.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(S::zero());
    heap.push(Reverse((OrdScalar(S::zero()), source)));
    while let Some(Reverse((OrdScalar(d), x))) = heap.pop() {
        if dist[x].is_some_and(|cur| d > cur) {
            continue;
        }
        for a in &arcs[x] {
            let nd = d + a.weight;
            if dist[a.to].is_none_or(|cur| nd < cur) {
                dist[a.to] = Some(nd);
                heap.push(Reverse((OrdScalar(nd), a.to)));
            }
        }
    }
    dist
}

/// For each node, the two shortest distances from `source` whose paths start
/// with different edges, tagged with that first edge.
fn two_label_distances<S: Scalar>(arcs: &[Vec<Arc<S>>], source: usize) -> Vec<[Option<(S, usize)>; 2]> {
    let mut best: Vec<[Option<(S, usize)>; 2]> = vec![[None, None]; arcs.len()];
    let mut heap = BinaryHeap::new();
    for arc in &arcs[source] {
        heap.push(Reverse((OrdScalar(arc.weight), arc.to, arc.edge)));
    }
    while let Some(Reverse((OrdScalar(d), x, label))) = heap.pop() {
        let slots = &mut best[x];
        match slots {
            [None, _] => slots[0] = Some((d, label)),
            [Some((_, l0)), None] if *l0 != label => slots[1] = Some((d, label)),
            _ => continue,
        }
        for arc in &arcs[x] {
            let nd = d + arc.weight;
            let s = &best[arc.to];
            let full = s[1].is_some() || s[0].is_some_and(|(_, l)| l == label);
            if !full {
                heap.push(Reverse((OrdScalar(nd), arc.to, label)));
            }
        }
    }
    best
}

/// Shortest `from -> to` distance avoiding `skip` and removed edges, if it is `<= limit`.
fn bounded_distance<S: Scalar>(
    arcs: &[Vec<Arc<S>>],
    removed: &[bool],
    from: usize,
    to: usize,
    skip: usize,
    limit: S,
) -> Option<S> {
    let mut dist: Vec<Option<S>> = vec![None; arcs.len()];
    let mut heap = BinaryHeap::new();
    dist[from] = Some(S::zero());
    heap.push(Reverse((OrdScalar(S::zero()), from)));
    while let Some(Reverse((OrdScalar(d), x))) = heap.pop() {
        if d > limit {
            return None;
        }
        if x == to {
            return Some(d);
        }
        if dist[x].is_some_and(|cur| d > cur) {
            continue;
        }
        for arc in &arcs[x] {
            if arc.edge == skip || removed[arc.edge] {
                continue;
            }
            let nd = d + arc.weight;
            if nd <= limit && dist[arc.to].is_none_or(|cur| nd < cur) {
                dist[arc.to] = Some(nd);
                heap.push(Reverse((OrdScalar(nd), arc.to)));
            }
        }
    }
    None
}
