//! Deterministic map-reduce over independent jobs.

use alloc::vec::Vec;

/// Runs independent jobs and returns their results in job order, so that any
/// reduction over the output is independent of scheduling.
pub trait Executor: Sync {
    fn map(&self, n_jobs: usize, job: &(dyn Fn(usize) -> Vec<f64> + Sync)) -> Vec<Vec<f64>>;
}

/// Runs jobs one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map(&self, n_jobs: usize, job: &(dyn Fn(usize) -> Vec<f64> + Sync)) -> Vec<Vec<f64>> {
        (0..n_jobs).map(job).collect()
    }
}

/// Sums job outputs elementwise in job order.
pub fn reduce_sum(parts: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0; len];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p.iter()) {
            *o += v;
        }
    }
    out
}
