use hyperelastic_core::exec::Executor;
use rayon::prelude::*;

/// Runs jobs on the current rayon pool; results come back in job order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map(&self, n_jobs: usize, job: &(dyn Fn(usize) -> Vec<f64> + Sync)) -> Vec<Vec<f64>> {
        (0..n_jobs).into_par_iter().map(job).collect()
    }
}
