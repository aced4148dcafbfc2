use driftopt::bounds::TransitionMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug)]
pub struct RandomChain {
    pub chain: TransitionMatrix,
    pub max_jump: Vec<usize>,
}

/// Decreasing chain on [0..n]: from i it moves down by 1..=J_i with random
/// weights, otherwise stays. Jump sizes grow with i so drifts vary.
pub fn random_chain(seed: u64) -> RandomChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=200usize);
    let mut rows = vec![vec![0.0; n + 1]; n + 1];
    let mut max_jump = vec![0; n + 1];
    rows[0][0] = 1.0;
    for i in 1..=n {
        let jump = rng.gen_range(1..=i.min(1 + i / 20).max(1));
        max_jump[i] = jump;
        let move_prob = rng.gen_range(0.05..0.95);
        let weights: Vec<f64> = (0..jump).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for (k, w) in weights.iter().enumerate() {
            rows[i][i - 1 - k] += move_prob * w / total;
        }
        rows[i][i] += 1.0 - move_prob;
    }
    RandomChain {
        chain: TransitionMatrix::new(rows).unwrap(),
        max_jump,
    }
}

/// Largest non-decreasing function below `v`.
#[allow(dead_code)]
pub fn lower_envelope(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].min(out[i + 1]);
    }
    out
}

/// Smallest non-decreasing function above `v`.
#[allow(dead_code)]
pub fn upper_envelope(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    for i in 1..out.len() {
        out[i] = out[i].max(out[i - 1]);
    }
    out
}
