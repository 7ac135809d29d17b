//! Synthetic stress histories standing in for molecular-dynamics output.

use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::paths::{generate_path, LoadingPath};
use super::stiffness::literature_stiffness;
use crate::energy::{EnergySource, StVenantKirchhoff};
use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{push_forward_stress, DeformationGradient, Tensor2, Tensor4Voigt6};

/// Saint Venant–Kirchhoff reference material.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthModel {
    pub id: String,
    pub stiffness: Tensor4Voigt6,
}

impl GroundTruthModel {
    pub fn new(id: impl Into<String>, stiffness: Tensor4Voigt6) -> Result<Self> {
        if stiffness.asymmetry() > 1e-9 * stiffness.norm() || !(stiffness.min_eigenvalue() > 0.0) {
            return Err(Error::Config("ground-truth stiffness must be symmetric positive definite".into()));
        }
        Ok(Self { id: id.into(), stiffness })
    }

    /// Ambient β-HMX literature stiffness.
    pub fn literature() -> Self {
        Self { id: "svk-literature".into(), stiffness: literature_stiffness() }
    }

    pub fn energy(&self) -> StVenantKirchhoff {
        StVenantKirchhoff::new(self.stiffness)
    }

    pub fn cauchy(&self, f: &DeformationGradient) -> Tensor2 {
        push_forward_stress(&self.energy().second_piola(f), f)
    }
}

/// AR(1) Gaussian fluctuations on the stress eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Stationary standard deviation, GPa.
    pub amplitude: f64,
    /// Correlation time in records.
    pub correlation: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub const DEFAULT_AMPLITUDE: f64 = 0.05;
    pub const DEFAULT_CORRELATION: f64 = 5.0;

    pub fn new(seed: u64) -> Self {
        Self { amplitude: Self::DEFAULT_AMPLITUDE, correlation: Self::DEFAULT_CORRELATION, seed }
    }

    pub fn none() -> Self {
        Self { amplitude: 0.0, correlation: Self::DEFAULT_CORRELATION, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0) || !(self.correlation >= 0.0) {
            return Err(Error::Config("noise amplitude and correlation must be non-negative".into()));
        }
        Ok(())
    }

    /// `n` samples of each of 3 channels, record-major.
    pub fn sample(&self, n: usize) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(n);
        if self.amplitude == 0.0 {
            out.resize(n, [0.0; 3]);
            return out;
        }
        let phi = if self.correlation > 0.0 { math::exp(-1.0 / self.correlation) } else { 0.0 };
        let innov = math::sqrt(1.0 - phi * phi);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut state = [0.0; 3];
        for t in 0..n {
            for s in state.iter_mut() {
                let xi: f64 = StandardNormal.sample(&mut rng);
                *s = if t == 0 { xi } else { phi * *s + innov * xi };
            }
            out.push([state[0] * self.amplitude, state[1] * self.amplitude, state[2] * self.amplitude]);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// ps.
    pub t: f64,
    pub f: DeformationGradient,
    /// Cauchy stress, GPa.
    pub sigma: Tensor2,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub path: String,
    pub noise_seed: u64,
    pub truth: String,
    /// Moving-average window if the series has been filtered.
    pub filter_window: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StressSeries {
    pub meta: SeriesMeta,
    pub records: Vec<Record>,
}

impl StressSeries {
    pub fn new(meta: SeriesMeta, records: Vec<Record>) -> Result<Self> {
        let s = Self { meta, records };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::Dataset("series has no records".into()));
        }
        if self.records.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::Dataset("record times must be strictly increasing".into()));
        }
        if self.records.iter().any(|r| !r.sigma.is_finite() || !r.t.is_finite()) {
            return Err(Error::Dataset("non-finite record".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Exact stress along the path with eigenvalue noise in the spectral frame.
pub fn synthesize_stress(path: &LoadingPath, truth: &GroundTruthModel, noise: &NoiseModel) -> Result<StressSeries> {
    noise.validate()?;
    let fs = generate_path(path)?;
    let times = path.times();
    let eta = noise.sample(fs.len());
    let records = fs
        .iter()
        .zip(times)
        .zip(eta)
        .map(|((f, t), n)| {
            let clean = truth.cauchy(f);
            let sigma = if noise.amplitude == 0.0 {
                clean
            } else {
                let e = clean.sym_eigen();
                e.reassemble(&[e.values[0] + n[0], e.values[1] + n[1], e.values[2] + n[2]])
            };
            Record { t, f: *f, sigma }
        })
        .collect();
    StressSeries::new(
        SeriesMeta { path: path.kind.label(), noise_seed: noise.seed, truth: truth.id.clone(), filter_window: None },
        records,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::paths::PathKind;

    #[test]
    fn noiseless_reference_is_stress_free() {
        let mut p = LoadingPath::new(PathKind::UniaxialTension { axis: 0 });
        p.duration = 1.0;
        let s = synthesize_stress(&p, &GroundTruthModel::literature(), &NoiseModel::none()).unwrap();
        assert_eq!(s.records[0].sigma, Tensor2::ZERO);
    }

    #[test]
    fn small_strain_limit() {
        let truth = GroundTruthModel::literature();
        for delta in [1e-3, 1e-4] {
            let mut f = Tensor2::IDENTITY;
            f.0[0][0] = math::sqrt(1.0 + 2.0 * delta);
            let sigma = truth.cauchy(&DeformationGradient::new(f).unwrap());
            let want = 22.97 * delta;
            assert!((sigma[(0, 0)] - want).abs() < 5.0 * 22.97 * delta * delta, "{delta}");
        }
    }

    #[test]
    fn noise_is_deterministic_and_scaled() {
        let p = LoadingPath::new(PathKind::Shear { i: 0, j: 1, positive: true });
        let truth = GroundTruthModel::literature();
        let a = synthesize_stress(&p, &truth, &NoiseModel::new(3)).unwrap();
        let b = synthesize_stress(&p, &truth, &NoiseModel::new(3)).unwrap();
        let c = synthesize_stress(&p, &truth, &NoiseModel::new(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.records[10].sigma, c.records[10].sigma);
        let eta = NoiseModel::new(9).sample(20000);
        let var: f64 = eta.iter().map(|e| e[0] * e[0]).sum::<f64>() / eta.len() as f64;
        assert!((var.sqrt() - 0.05).abs() < 0.005);
    }

    #[test]
    fn rejects_indefinite_truth() {
        assert!(GroundTruthModel::new("bad", Tensor4Voigt6::isotropic(-5.0, 1.0)).is_err());
        assert!(GroundTruthModel::new("iso", Tensor4Voigt6::isotropic(1.0, 1.0)).is_ok());
    }
}
