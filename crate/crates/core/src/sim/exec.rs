use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::graph::{NodeId, TopoGraph};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    /// Terminated while traversing the edge leaving `nodes[edge]`.
    Terminated {
        edge: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub attempted: Vec<NodeId>,
    /// Nodes actually reached, a prefix of `attempted`.
    pub realized: Vec<NodeId>,
    pub outcome: Outcome,
    pub seed: u64,
}

impl ExecutionTrace {
    pub fn completed(&self) -> bool {
        self.outcome == Outcome::Completed
    }
}

/// Executes a walk where each time-step of travel independently terminates
/// the run with probability `1 - gamma`.
///
/// An edge of traversal distance `d` takes `floor(d)` whole steps plus one
/// fractional step that survives with probability `gamma^frac(d)`, so the
/// whole walk survives with probability `gamma^(sum d)`.
pub fn execute_walk<S: Scalar>(g: &TopoGraph<S>, nodes: &[NodeId], gamma: f64, seed: u64) -> Result<ExecutionTrace, SimError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(SimError::InvalidGamma(gamma));
    }
    let costs = edge_costs(g, nodes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut realized = vec![nodes[0]];
    for (k, d) in costs.into_iter().enumerate() {
        let whole = d.floor();
        let frac = d - whole;
        let mut alive = (0..whole as u64).all(|_| rng.random::<f64>() < gamma);
        if alive && frac > 0.0 {
            alive = rng.random::<f64>() < gamma.powf(frac);
        }
        if !alive {
            return Ok(ExecutionTrace { attempted: nodes.to_vec(), realized, outcome: Outcome::Terminated { edge: k }, seed });
        }
        realized.push(nodes[k + 1]);
    }
    Ok(ExecutionTrace { attempted: nodes.to_vec(), realized, outcome: Outcome::Completed, seed })
}

fn edge_costs<S: Scalar>(g: &TopoGraph<S>, nodes: &[NodeId]) -> Result<Vec<f64>, SimError> {
    let Some(&first) = nodes.first() else {
        return Err(SimError::InvalidWalk("empty walk".into()));
    };
    if !g.contains(first) {
        return Err(SimError::InvalidWalk(format!("node {first} is not in the graph")));
    }
    nodes
        .windows(2)
        .map(|w| {
            g.distance(w[0], w[1])
                .map(|d| d.to_f64_lossless())
                .ok_or_else(|| SimError::InvalidWalk(format!("no edge {} -> {}", w[0], w[1])))
        })
        .collect()
}

/// Fraction of `runs` executions, seeded `seed..seed+runs`, that complete.
pub fn completion_rate<S: Scalar>(g: &TopoGraph<S>, nodes: &[NodeId], gamma: f64, seed: u64, runs: u64) -> Result<f64, SimError> {
    if runs == 0 {
        return Err(SimError::InvalidWalk("zero runs".into()));
    }
    let mut done = 0u64;
    for k in 0..runs {
        done += u64::from(execute_walk(g, nodes, gamma, seed.wrapping_add(k))?.completed());
    }
    Ok(done as f64 / runs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Frame, ObservationNode, Provenance};

    fn chain(weights: &[f64]) -> TopoGraph<f64> {
        let mut g = TopoGraph::new(Frame::Planar, true);
        for i in 0..=weights.len() {
            g.add_node(ObservationNode::planar(i as u64, i as f64, 0.0, 0.0, 0)).unwrap();
        }
        for (i, &w) in weights.iter().enumerate() {
            g.add_edge(Edge { src: i as u64, dst: i as u64 + 1, distance: w, provenance: Provenance::Learned }).unwrap();
        }
        g
    }

    #[test]
    fn trivial_walk_always_completes() {
        let g = chain(&[2.0]);
        let t = execute_walk(&g, &[0], 0.5, 1).unwrap();
        assert!(t.completed());
        assert_eq!(t.realized, vec![0]);
    }

    #[test]
    fn same_seed_same_trace() {
        let g = chain(&[3.0, 2.5, 4.0]);
        let a = execute_walk(&g, &[0, 1, 2, 3], 0.9, 42).unwrap();
        let b = execute_walk(&g, &[0, 1, 2, 3], 0.9, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn realized_is_prefix() {
        let g = chain(&[3.0, 2.5, 4.0]);
        for seed in 0..200 {
            let t = execute_walk(&g, &[0, 1, 2, 3], 0.8, seed).unwrap();
            assert!(t.attempted.starts_with(&t.realized));
            match t.outcome {
                Outcome::Completed => assert_eq!(t.realized.len(), 4),
                Outcome::Terminated { edge } => assert_eq!(t.realized.len(), edge + 1),
            }
        }
    }

    #[test]
    fn rate_tracks_survival_probability() {
        let g = chain(&[3.0, 2.5]);
        let rate = completion_rate(&g, &[0, 1, 2], 0.9, 0, 20_000).unwrap();
        let p = 0.9f64.powf(5.5);
        let se = (p * (1.0 - p) / 20_000.0).sqrt();
        assert!((rate - p).abs() < 4.0 * se, "rate {rate} vs {p}");
    }

    #[test]
    fn rejects_missing_edge_and_bad_gamma() {
        let g = chain(&[1.0]);
        assert!(matches!(execute_walk(&g, &[1, 0], 0.9, 0), Err(SimError::InvalidWalk(_))));
        assert!(matches!(execute_walk(&g, &[0, 1], 1.0, 0), Err(SimError::InvalidGamma(_))));
        assert!(matches!(execute_walk(&g, &[], 0.5, 0), Err(SimError::InvalidWalk(_))));
    }
}
