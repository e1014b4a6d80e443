use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ScoreError, ScoreMatrix};
use crate::scalar::Scalar;
use crate::sim::SyntheticWorld;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Logit at nodes that carry the landmark.
    pub base_hit: f64,
    /// Logit everywhere else.
    pub base_miss: f64,
    /// Standard deviation of the additive Gaussian noise.
    pub sigma: f64,
    /// Fraction of landmark pairs whose hit sets are swapped.
    pub confusion: f64,
    /// Probability that a node not carrying a landmark still scores like a
    /// hit for it. Spurious hits therefore grow with world size.
    #[serde(default)]
    pub false_positive_rate: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { base_hit: 6.0, base_miss: 0.0, sigma: 1.0, confusion: 0.0, false_positive_rate: 0.0 }
    }
}

/// Logits emulating an image-text model over a synthetic world.
///
/// Rows follow `labels`; columns are every world node in id order. Landmarks
/// are paired in row order `(0,1), (2,3), ...` and `round(confusion * pairs)`
/// of those pairs, chosen by the seed, exchange their hit nodes. Every other
/// node then joins a row's hits with probability `false_positive_rate`.
pub fn synthetic_scores<S: Scalar>(
    world: &SyntheticWorld,
    labels: &[String],
    noise: &NoiseSpec,
    seed: u64,
) -> Result<ScoreMatrix<S>, ScoreError> {
    let mut hits = Vec::with_capacity(labels.len());
    for l in labels {
        hits.push(world.placements().get(l).ok_or_else(|| ScoreError::UnknownLandmark(l.clone()))?.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let pairs = labels.len() / 2;
    let confused = ((noise.confusion.clamp(0.0, 1.0) * pairs as f64).round() as usize).min(pairs);
    let mut order: Vec<usize> = (0..pairs).collect();
    order.shuffle(&mut rng);
    for &p in &order[..confused] {
        hits.swap(2 * p, 2 * p + 1);
    }

    let ids: Vec<_> = world.node_ids().collect();
    let fp = noise.false_positive_rate.clamp(0.0, 1.0);
    for hit in &mut hits {
        for &id in &ids {
            if !hit.contains(&id) && rng.random_bool(fp) {
                hit.insert(id);
            }
        }
    }
    let mut logits = Vec::with_capacity(labels.len() * ids.len());
    for hit in &hits {
        for id in &ids {
            let base = if hit.contains(id) { noise.base_hit } else { noise.base_miss };
            let z: f64 = rng.sample(StandardNormal);
            logits.push(S::of(base + noise.sigma * z));
        }
    }
    ScoreMatrix::new(labels.to_vec(), ids, logits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_world, WorldSpec};

    fn world(rows: usize, cols: usize, landmarks: usize) -> SyntheticWorld {
        generate_world(&WorldSpec::grid(rows, cols, landmarks, 11)).unwrap().0
    }

    fn argmax(row: &[f64]) -> usize {
        (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap()
    }

    fn true_node(w: &SyntheticWorld, label: &str) -> crate::graph::NodeId {
        *w.placements()[label].iter().next().unwrap()
    }

    #[test]
    fn noiseless_argmax_is_the_true_node() {
        let w = world(5, 5, 4);
        let labels: Vec<String> = w.placements().keys().cloned().collect();
        let noise = NoiseSpec { sigma: 0.0, ..NoiseSpec::default() };
        let m: ScoreMatrix<f64> = synthetic_scores(&w, &labels, &noise, 1).unwrap();
        for (i, l) in labels.iter().enumerate() {
            assert_eq!(m.node_ids()[argmax(m.row(i))], true_node(&w, l));
        }
    }

    #[test]
    fn full_confusion_swaps_a_pair() {
        let w = world(5, 5, 2);
        let labels: Vec<String> = w.placements().keys().cloned().collect();
        let noise = NoiseSpec { sigma: 0.0, confusion: 1.0, ..NoiseSpec::default() };
        let m: ScoreMatrix<f64> = synthetic_scores(&w, &labels, &noise, 1).unwrap();
        assert_eq!(m.node_ids()[argmax(m.row(0))], true_node(&w, &labels[1]));
        assert_eq!(m.node_ids()[argmax(m.row(1))], true_node(&w, &labels[0]));
    }

    #[test]
    fn unit_noise_keeps_the_true_node_in_the_top_three() {
        let w = world(10, 10, 4);
        let labels: Vec<String> = w.placements().keys().cloned().collect();
        let (mut hits, mut rows) = (0usize, 0usize);
        for seed in 0..1000 {
            let m: ScoreMatrix<f64> = synthetic_scores(&w, &labels, &NoiseSpec::default(), seed).unwrap();
            for (i, l) in labels.iter().enumerate() {
                let col = m.column_of(true_node(&w, l)).unwrap();
                let above = m.row(i).iter().filter(|&&x| x > m.row(i)[col]).count();
                hits += usize::from(above < 3);
                rows += 1;
            }
        }
        assert!(hits as f64 / rows as f64 >= 0.99, "{hits}/{rows}");
    }

    #[test]
    fn deterministic_and_rejects_unknown_labels() {
        let w = world(4, 4, 2);
        let labels: Vec<String> = w.placements().keys().cloned().collect();
        let a: ScoreMatrix<f64> = synthetic_scores(&w, &labels, &NoiseSpec::default(), 3).unwrap();
        let b: ScoreMatrix<f64> = synthetic_scores(&w, &labels, &NoiseSpec::default(), 3).unwrap();
        assert_eq!(a, b);
        let err = synthetic_scores::<f64>(&w, &["unicorn".to_string()], &NoiseSpec::default(), 3).unwrap_err();
        assert!(matches!(err, ScoreError::UnknownLandmark(_)));
    }
}
