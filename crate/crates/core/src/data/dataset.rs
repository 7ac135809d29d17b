//! Train/validation pairs for either conjugate pair.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::synth::StressSeries;
use crate::energy::{ConjugatePair, Normalizer};
use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{pull_back_stress, DeformationGradient};

/// Physical inputs and stress targets with a seeded split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub pair: ConjugatePair,
    /// Row-major `n × d` strain inputs (E in Voigt order or F row-major).
    pub inputs: Vec<f64>,
    /// Row-major `n × d` stress targets (S in Voigt order or P row-major), GPa.
    pub stresses: Vec<f64>,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    /// Input of the stress-free reference record.
    pub reference: Vec<f64>,
    /// Smallest `det F` over all records.
    pub min_jacobian: f64,
    pub normalizer: Normalizer,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.pair.input_dim()
    }

    pub fn len(&self) -> usize {
        self.inputs.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.inputs[i * d..(i + 1) * d]
    }

    pub fn stress(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.stresses[i * d..(i + 1) * d]
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let n = self.len();
        if self.inputs.len() != n * d || self.stresses.len() != n * d || self.reference.len() != d {
            return Err(Error::Dataset("array lengths disagree with the conjugate pair".into()));
        }
        let mut seen = alloc::vec![false; n];
        for &i in self.train.iter().chain(self.validation.iter()) {
            if i >= n || seen[i] {
                return Err(Error::Dataset(format!("split index {i} out of range or repeated")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Dataset("split does not cover every record".into()));
        }
        if self.inputs.iter().chain(self.stresses.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Dataset("non-finite values".into()));
        }
        Ok(())
    }

    /// Keeps every `stride`-th record of each partition; the normaliser is kept.
    pub fn thinned(&self, stride: usize) -> Dataset {
        let stride = stride.max(1);
        let d = self.dim();
        let mut out = Dataset {
            inputs: Vec::new(),
            stresses: Vec::new(),
            train: Vec::new(),
            validation: Vec::new(),
            ..self.clone()
        };
        for (part, is_train) in [(&self.train, true), (&self.validation, false)] {
            for &i in part.iter().step_by(stride) {
                let k = out.inputs.len() / d;
                out.inputs.extend_from_slice(self.input(i));
                out.stresses.extend_from_slice(self.stress(i));
                if is_train {
                    out.train.push(k);
                } else {
                    out.validation.push(k);
                }
            }
        }
        out
    }
}

/// Pulls the filtered Cauchy stress back to `S` (or `P = F S`), splits with a
/// seeded shuffle and fits the normaliser on the training part plus the reference.
pub fn build_dataset(series: &[StressSeries], pair: ConjugatePair, split: f64, seed: u64) -> Result<Dataset> {
    if series.iter().all(|s| s.is_empty()) {
        return Err(Error::Dataset("no records".into()));
    }
    if !(0.0..=1.0).contains(&split) {
        return Err(Error::Dataset(format!("split fraction {split} outside [0, 1]")));
    }
    let d = pair.input_dim();
    let mut inputs = Vec::new();
    let mut stresses = Vec::new();
    let mut min_jacobian = f64::INFINITY;
    for s in series {
        for r in &s.records {
            let sp = pull_back_stress(&r.sigma, &r.f).sym();
            let target = match pair {
                ConjugatePair::SE => sp,
                ConjugatePair::PF => r.f.tensor().dot(&sp),
            };
            inputs.extend(pair.input(&r.f));
            stresses.extend(pair.stress_components(&target));
            min_jacobian = min_jacobian.min(r.f.jacobian());
        }
    }
    let n = inputs.len() / d;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = math::round(split * n as f64) as usize;
    let train = order[..n_train].to_vec();
    let validation = order[n_train..].to_vec();

    let reference = pair.input(&DeformationGradient::identity());
    let mut fit_x = reference.clone();
    let mut fit_s = alloc::vec![0.0; d];
    for &i in &train {
        fit_x.extend_from_slice(&inputs[i * d..(i + 1) * d]);
        fit_s.extend_from_slice(&stresses[i * d..(i + 1) * d]);
    }
    let normalizer = Normalizer::fit(&fit_x, &fit_s, d)?;
    let ds = Dataset { pair, inputs, stresses, train, validation, reference, min_jacobian, normalizer };
    ds.validate()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::paths::{LoadingPath, PathKind};
    use crate::data::synth::{synthesize_stress, GroundTruthModel, NoiseModel};

    fn series(n: usize) -> StressSeries {
        let mut p = LoadingPath::new(PathKind::UniaxialTension { axis: 1 });
        p.interval = p.duration / (n - 1) as f64;
        synthesize_stress(&p, &GroundTruthModel::literature(), &NoiseModel::new(1)).unwrap()
    }

    #[test]
    fn split_is_disjoint_and_exhaustive() {
        let ds = build_dataset(&[series(1000)], ConjugatePair::SE, 0.7, 5).unwrap();
        assert_eq!(ds.len(), 1000);
        assert_eq!((ds.train.len(), ds.validation.len()), (700, 300));
        let mut all: Vec<usize> = ds.train.iter().chain(ds.validation.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
        let again = build_dataset(&[series(1000)], ConjugatePair::SE, 0.7, 5).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn normalizer_round_trip() {
        let ds = build_dataset(&[series(200)], ConjugatePair::PF, 0.7, 2).unwrap();
        for i in 0..ds.len() {
            let x = ds.input(i);
            let back = ds.normalizer.denormalize_input(&ds.normalizer.normalize_input(x));
            assert!(x.iter().zip(back.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
            let s = ds.stress(i);
            let back = ds.normalizer.denormalize_stress(&ds.normalizer.normalize_stress(s));
            assert!(s.iter().zip(back.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(build_dataset(&[], ConjugatePair::SE, 0.7, 0), Err(Error::Dataset(_))));
    }
}
