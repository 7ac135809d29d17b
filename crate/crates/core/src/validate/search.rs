//! Gradient-free hill climbing.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HillClimbConfig {
    pub iterations: usize,
    /// Initial proposal scale per coordinate.
    pub step: f64,
    /// Consecutive rejections before the step is halved.
    pub patience: usize,
}

impl Default for HillClimbConfig {
    fn default() -> Self {
        Self { iterations: 10_000, step: 0.1, patience: 100 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HillClimb {
    pub best: Vec<f64>,
    pub value: f64,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

/// Minimises `objective` from `start` with Gaussian neighbour proposals.
/// `clamp` projects proposals back into the admissible box.
pub fn hill_climb(
    objective: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    config: &HillClimbConfig,
    seed: u64,
    clamp: Option<&dyn Fn(&mut [f64])>,
) -> HillClimb {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = start.to_vec();
    let mut value = objective(&best);
    let mut trace = Vec::with_capacity(config.iterations);
    let mut step = config.step;
    let mut rejected = 0;
    let mut cand = best.clone();
    for _ in 0..config.iterations {
        for (c, b) in cand.iter_mut().zip(best.iter()) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *c = b + step * z;
        }
        if let Some(f) = clamp {
            f(&mut cand);
        }
        let v = objective(&cand);
        if v < value {
            value = v;
            best.copy_from_slice(&cand);
            rejected = 0;
        } else {
            rejected += 1;
            if rejected >= config.patience {
                step *= 0.5;
                rejected = 0;
            }
        }
        trace.push(value);
    }
    HillClimb { best, value, trace }
}
