use std::collections::HashSet;

use log::debug;

use super::{reduce_graph, spatial_distance, Edge, Frame, GraphError, ObservationNode, Provenance, TopoGraph};
use crate::scalar::Scalar;

/// Pairwise traversal estimate between two observations, in time-steps.
///
/// Implementations need not be symmetric.
pub trait DistanceEstimator<S> {
    fn estimate(&self, from: &ObservationNode, to: &ObservationNode) -> S;
}

impl<S, F> DistanceEstimator<S> for F
where
    F: Fn(&ObservationNode, &ObservationNode) -> S,
{
    fn estimate(&self, from: &ObservationNode, to: &ObservationNode) -> S {
        self(from, to)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphBuildParams {
    /// Timestamp threshold in seconds.
    pub epsilon: f64,
    /// Learned distance threshold in time-steps.
    pub tau: f64,
    /// Spatial threshold in meters.
    pub eta: f64,
    pub reduction_slack: f64,
    /// Run the weighted transitive reduction after edge insertion.
    pub reduce: bool,
    /// Enable the learned-distance clause. Records without a position are
    /// only accepted when this is off.
    pub learned_clause: bool,
    pub directed: bool,
}

impl Default for GraphBuildParams {
    fn default() -> Self {
        Self { epsilon: 1.0, tau: 80.0, eta: 100.0, reduction_slack: 0.0, reduce: true, learned_clause: true, directed: true }
    }
}

impl GraphBuildParams {
    pub fn validate(&self) -> Result<(), GraphError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(GraphError::InvalidParams(format!("{name} must be > 0, got {v}")))
            }
        };
        positive("epsilon", self.epsilon)?;
        positive("tau", self.tau)?;
        positive("eta", self.eta)?;
        if !(self.reduction_slack.is_finite() && self.reduction_slack >= 0.0) {
            return Err(GraphError::InvalidParams(format!("reduction_slack must be >= 0, got {}", self.reduction_slack)));
        }
        Ok(())
    }
}

/// Edge rule for one ordered pair: temporal proximity alone, or a short
/// learned distance confirmed by spatial proximity. `spatial` is only
/// evaluated when the learned clause needs it.
pub fn edge_predicate<S: Scalar>(
    time_gap: f64,
    learned: S,
    spatial: impl FnOnce() -> Result<f64, GraphError>,
    params: &GraphBuildParams,
) -> Result<Option<Provenance>, GraphError> {
    if time_gap < params.epsilon {
        return Ok(Some(Provenance::Temporal));
    }
    if params.learned_clause && learned < S::of(params.tau) && spatial()? < params.eta {
        return Ok(Some(Provenance::Learned));
    }
    Ok(None)
}

/// Builds a topological graph from time-ordered trajectories.
///
/// Every ordered pair of records is tested with [`edge_predicate`]; accepted
/// pairs get the estimator's distance as weight. The result is reduced when
/// `params.reduce` is set.
pub fn build_graph<S: Scalar, D: DistanceEstimator<S> + ?Sized>(
    trajectories: &[Vec<ObservationNode>],
    distance: &D,
    params: &GraphBuildParams,
) -> Result<TopoGraph<S>, GraphError> {
    params.validate()?;

    let mut frame: Option<Frame> = None;
    let mut seen = HashSet::new();
    let mut records: Vec<&ObservationNode> = Vec::new();
    for (t, traj) in trajectories.iter().enumerate() {
        let mut last_ts = f64::NEG_INFINITY;
        for (r, rec) in traj.iter().enumerate() {
            let bad = |reason: String| GraphError::InvalidRecord { trajectory: t, record: r, reason };
            if !rec.timestamp.is_finite() || rec.timestamp < 0.0 {
                return Err(bad(format!("timestamp {} must be finite and non-negative", rec.timestamp)));
            }
            if rec.timestamp < last_ts {
                return Err(bad("trajectory is not time-ordered".into()));
            }
            last_ts = rec.timestamp;
            match &rec.position {
                Some(p) if !p.is_finite() => return Err(bad("non-finite position".into())),
                Some(p) => match frame {
                    None => frame = Some(p.frame()),
                    Some(f) if f != p.frame() => return Err(GraphError::FrameMismatch(f, p.frame())),
                    _ => {}
                },
                None if params.learned_clause => {
                    return Err(bad(format!("node {} has no position but the learned clause is enabled", rec.id)))
                }
                None => {}
            }
            if !seen.insert(rec.id) {
                return Err(GraphError::DuplicateNode(rec.id));
            }
            records.push(rec);
        }
    }

    let mut g = TopoGraph::new(frame.unwrap_or(Frame::Planar), params.directed);
    for rec in &records {
        g.add_node((*rec).clone())?;
    }

    let mut temporal = 0usize;
    let mut learned = 0usize;
    for a in &records {
        for b in &records {
            if a.id == b.id {
                continue;
            }
            let d = distance.estimate(a, b);
            if !d.is_finite() || d < S::zero() {
                return Err(GraphError::InvalidDistance { src: a.id, dst: b.id, value: d.to_f64_lossless() });
            }
            let gap = (a.timestamp - b.timestamp).abs();
            let spatial = || match (&a.position, &b.position) {
                (Some(pa), Some(pb)) => spatial_distance(pa, pb),
                (None, _) => Err(GraphError::MissingPosition(a.id)),
                (_, None) => Err(GraphError::MissingPosition(b.id)),
            };
            if let Some(provenance) = edge_predicate(gap, d, spatial, params)? {
                match provenance {
                    Provenance::Temporal => temporal += 1,
                    Provenance::Learned => learned += 1,
                }
                g.add_edge(Edge { src: a.id, dst: b.id, distance: d, provenance })?;
            }
        }
    }
    debug!("built graph: {} nodes, {temporal} temporal + {learned} learned edges", g.node_count());

    if params.reduce {
        let (reduced, stats) = reduce_graph(&g, S::of(params.reduction_slack));
        debug!("reduction removed {} of {} edges", stats.removed, stats.before);
        g = reduced;
    }
    Ok(g)
}
