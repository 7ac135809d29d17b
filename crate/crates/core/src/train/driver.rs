//! Minibatch training and constraint transfer.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{orbit_penalty, reference_terms, stress_term, symmetry_orbits, LossWeights, Orbit, PenaltyParts, Side};
use super::nadam::{Nadam, NadamConfig};
use crate::data::Dataset;
use crate::energy::{ConjugatePair, ModelBundle};
use crate::error::{Error, Result};
use crate::exec::{reduce_sum, Executor};
use crate::tensor::{monoclinic_f, CrystalBasis, DeformationGradient, MonoclinicStretch, Rotation, Tensor2, Vec3};

const CONSTRAINT_STREAM: u64 = 0x6a09_e667_f3bc_c908;
const METRIC_STREAM: u64 = 0xbb67_ae85_84ca_a73b;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    None,
    FrameInvariance,
    Symmetry,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstraintConfig {
    pub kind: ConstraintKind,
    /// Rotations per epoch for the objectivity penalty.
    pub rotations: usize,
    /// Anchor deformations per batch.
    pub samples: usize,
    /// Square the energy term instead of using its absolute value.
    pub square_energy: bool,
    /// Referential two-fold axis.
    pub symmetry_axis: Vec3,
    /// Monoclinic stretch parameters are drawn from `1 ± r` (and `± r` for the coupling).
    pub stretch_range: f64,
    /// Size of the fixed evaluation sets used for the logged constraint metrics.
    pub metric_samples: usize,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        Self {
            kind: ConstraintKind::None,
            rotations: 4,
            samples: 32,
            square_energy: false,
            symmetry_axis: CrystalBasis::beta_hmx().unique_axis(),
            stretch_range: 0.15,
            metric_samples: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: NadamConfig,
    pub weights: LossWeights,
    pub constraint: ConstraintConfig,
    /// Points per parallel job; fixes the summation order.
    pub chunk_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            batch_size: 512,
            seed: 0,
            optimizer: NadamConfig::default(),
            weights: LossWeights::default(),
            constraint: ConstraintConfig::default(),
            chunk_size: 128,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.chunk_size == 0 {
            return Err(Error::Config("batch size and chunk size must be at least 1".into()));
        }
        self.optimizer.validate()?;
        self.weights.validate()?;
        let c = &self.constraint;
        if c.kind == ConstraintKind::FrameInvariance && c.rotations == 0 {
            return Err(Error::Config("frame-invariance penalty needs at least one rotation".into()));
        }
        if !(c.stretch_range >= 0.0 && c.stretch_range < 1.0) {
            return Err(Error::Config("stretch range must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Per-epoch losses; constraint metrics are `None` for S–E models.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub energy_ref: f64,
    pub stress_ref: f64,
    pub stress: f64,
    pub val_stress: f64,
    pub penalty: f64,
    pub frame_energy: Option<f64>,
    pub frame_stress: Option<f64>,
    pub frame_tangent: Option<f64>,
    pub sym_energy: Option<f64>,
    pub sym_stress: Option<f64>,
    pub sym_tangent: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossTrace {
    pub epochs: Vec<EpochRecord>,
}

impl LossTrace {
    pub fn last(&self) -> Option<&EpochRecord> {
        self.epochs.last()
    }
}

/// Resumable training state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model: ModelBundle,
    pub optimizer: Nadam,
    pub epoch: usize,
    pub trace: LossTrace,
}

/// Fixed evaluation orbits for the logged constraint metrics.
struct MetricSets {
    frame: Vec<Orbit>,
    symmetry: Vec<Orbit>,
}

fn sample_monoclinic(rng: &mut ChaCha8Rng, n: usize, range: f64, axis: &Vec3) -> Result<Vec<DeformationGradient>> {
    let basis = CrystalBasis::beta_hmx();
    let basis = if *axis == basis.unique_axis() {
        basis
    } else {
        // keep M₁, M₃ orthogonal-ish to a user axis: build from any complement
        let n = crate::tensor::norm3(axis);
        let b = crate::tensor::scale3(axis, 1.0 / n);
        let t = if b[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
        let m1 = crate::tensor::cross3(&b, &t);
        let m3 = crate::tensor::cross3(&m1, &b);
        CrystalBasis::new([m1, b, m3])?
    };
    (0..n)
        .map(|_| {
            let mut a = [1.0, 1.0, 1.0, 0.0];
            if range > 0.0 {
                for v in a.iter_mut().take(3) {
                    *v = rng.random_range(1.0 - range..1.0 + range);
                }
                a[3] = rng.random_range(-range..range);
            }
            monoclinic_f(&MonoclinicStretch { a }, &Rotation::identity(), &basis)
        })
        .collect()
}

fn f_of_input(x: &[f64]) -> Result<DeformationGradient> {
    DeformationGradient::new(Tensor2::from_slice(x))
}

pub struct Trainer<'a> {
    model: ModelBundle,
    dataset: &'a Dataset,
    config: TrainConfig,
    optimizer: Nadam,
    epoch: usize,
    trace: LossTrace,
    metrics: Option<MetricSets>,
}

impl<'a> Trainer<'a> {
    pub fn new(model: ModelBundle, dataset: &'a Dataset, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        model.validate()?;
        if model.pair != dataset.pair {
            return Err(Error::Variant { expected: model.pair.name(), got: dataset.pair.name() });
        }
        if config.constraint.kind != ConstraintKind::None && model.pair != ConjugatePair::PF {
            return Err(Error::Variant { expected: ConjugatePair::PF.name(), got: model.pair.name() });
        }
        let n = model.net.n_params();
        let metrics = if model.pair == ConjugatePair::PF { Some(Self::metric_sets(dataset, &config)?) } else { None };
        Ok(Self { model, dataset, optimizer: Nadam::new(config.optimizer, n), config, epoch: 0, trace: LossTrace::default(), metrics })
    }

    pub fn resume(checkpoint: Checkpoint, dataset: &'a Dataset, config: TrainConfig) -> Result<Self> {
        let mut t = Self::new(checkpoint.model, dataset, config)?;
        if checkpoint.optimizer.m.len() != t.model.net.n_params() {
            return Err(Error::Config("checkpoint optimizer does not match the model".into()));
        }
        t.optimizer = checkpoint.optimizer;
        t.epoch = checkpoint.epoch;
        t.trace = checkpoint.trace;
        Ok(t)
    }

    fn metric_sets(dataset: &Dataset, config: &TrainConfig) -> Result<MetricSets> {
        let c = &config.constraint;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ METRIC_STREAM);
        let pool: Vec<usize> = if dataset.validation.is_empty() { dataset.train.clone() } else { dataset.validation.clone() };
        let n = c.metric_samples.min(pool.len());
        let rotations: Vec<Rotation> = (0..c.rotations.max(1)).map(|_| Rotation::random(&mut rng)).collect();
        let frame = pool[..n]
            .iter()
            .map(|&i| Ok(Orbit { f: f_of_input(dataset.input(i))?, rotations: rotations.clone() }))
            .collect::<Result<Vec<_>>>()?;
        let sym_f = sample_monoclinic(&mut rng, c.metric_samples, c.stretch_range, &c.symmetry_axis)?;
        Ok(MetricSets { frame, symmetry: symmetry_orbits(&sym_f, &c.symmetry_axis)? })
    }

    pub fn model(&self) -> &ModelBundle {
        &self.model
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn trace(&self) -> &LossTrace {
        &self.trace
    }

    pub fn into_parts(self) -> (ModelBundle, LossTrace) {
        (self.model, self.trace)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { model: self.model.clone(), optimizer: self.optimizer.clone(), epoch: self.epoch, trace: self.trace.clone() }
    }

    /// Validation loss and constraint metrics of the current model, without training.
    pub fn evaluate(&self, exec: &dyn Executor) -> EpochRecord {
        let mut r = EpochRecord { epoch: self.epoch, ..Default::default() };
        self.finish_epoch(exec, &mut r);
        r
    }

    pub fn is_done(&self) -> bool {
        self.epoch >= self.config.epochs
    }

    /// Runs epochs until the configured count is reached.
    pub fn run(&mut self, exec: &dyn Executor) -> Result<()> {
        while !self.is_done() {
            self.step_epoch(exec)?;
        }
        Ok(())
    }

    /// One pass over the shuffled training set.
    pub fn step_epoch(&mut self, exec: &dyn Executor) -> Result<()> {
        let epoch = self.epoch;
        let cfg = self.config;
        let ds = self.dataset;
        let d = ds.dim();
        let mut order = ds.train.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(epoch as u64);
        order.shuffle(&mut rng);
        let mut crng = ChaCha8Rng::seed_from_u64(cfg.seed ^ CONSTRAINT_STREAM);
        crng.set_stream(epoch as u64);
        let c = cfg.constraint;
        let rotations: Vec<Rotation> = match c.kind {
            ConstraintKind::FrameInvariance => (0..c.rotations).map(|_| Rotation::random(&mut crng)).collect(),
            _ => Vec::new(),
        };
        let n_train = order.len().max(1) as f64;
        let mut acc = EpochRecord { epoch: epoch + 1, ..Default::default() };
        let np = self.model.net.n_params();
        let batches: Vec<Vec<usize>> = if order.is_empty() { vec![Vec::new()] } else { order.chunks(cfg.batch_size).map(<[usize]>::to_vec).collect() };
        for batch in batches {
            let mut inputs = Vec::with_capacity(batch.len() * d);
            let mut targets = Vec::with_capacity(batch.len() * d);
            for &i in &batch {
                inputs.extend_from_slice(ds.input(i));
                targets.extend_from_slice(ds.stress(i));
            }
            let orbits: Vec<Orbit> = match c.kind {
                ConstraintKind::None => Vec::new(),
                ConstraintKind::FrameInvariance => batch
                    .iter()
                    .take(c.samples)
                    .map(|&i| Ok(Orbit { f: f_of_input(ds.input(i))?, rotations: rotations.clone() }))
                    .collect::<Result<_>>()?,
                ConstraintKind::Symmetry => {
                    symmetry_orbits(&sample_monoclinic(&mut crng, c.samples, c.stretch_range, &c.symmetry_axis)?, &c.symmetry_axis)?
                }
            };
            let (parts, pen, grad) = self.batch_gradient(exec, &inputs, &targets, &orbits);
            let loss = parts[0] + cfg.weights.w_s * (parts[1] + parts[2]) + pen.total(&cfg.weights);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { epoch: epoch + 1 });
            }
            let w = batch.len() as f64 / n_train;
            acc.loss += w * loss;
            acc.energy_ref += w * parts[0];
            acc.stress_ref += w * parts[1];
            acc.stress += w * parts[2];
            acc.penalty += w * pen.total(&cfg.weights);
            let mut p = self.model.net.params();
            debug_assert_eq!(p.len(), np);
            self.optimizer.update(&mut p, &grad);
            self.model.net.set_params(&p);
        }
        self.finish_epoch(exec, &mut acc);
        if !acc.val_stress.is_finite() {
            return Err(Error::Diverged { epoch: epoch + 1 });
        }
        self.trace.epochs.push(acc);
        self.epoch += 1;
        Ok(())
    }

    /// `[energy_ref, stress_ref, stress]`, penalty parts and the gradient of the total.
    fn batch_gradient(
        &self,
        exec: &dyn Executor,
        inputs: &[f64],
        targets: &[f64],
        orbits: &[Orbit],
    ) -> ([f64; 3], PenaltyParts, Vec<f64>) {
        let cfg = &self.config;
        let model = &self.model;
        let d = model.dim();
        let n = inputs.len() / d;
        let np = model.net.n_params();
        let chunk = cfg.chunk_size;
        let n_stress = n.div_ceil(chunk);
        let orbit_chunk = 8;
        let n_orbit = orbits.len().div_ceil(orbit_chunk);
        let w = cfg.weights;
        let c = cfg.constraint;
        let penalize = c.kind != ConstraintKind::None && w.constraint_active();
        let n_rot: usize = orbits.iter().map(|o| o.rotations.len()).sum();
        let (side, scale) = match c.kind {
            ConstraintKind::Symmetry => (Side::Referential, 1.0 / orbits.len().max(1) as f64),
            _ => (Side::Spatial, 1.0 / n_rot.max(1) as f64),
        };
        let n_jobs = 1 + n_stress + if penalize { n_orbit } else { 0 };
        let job = |j: usize| -> Vec<f64> {
            let mut out = vec![0.0; 6 + np];
            let (head, g) = out.split_at_mut(6);
            if j == 0 {
                let (e, s) = reference_terms(model, w.w_s, 1.0, Some(g));
                head[0] = e;
                head[1] = s;
            } else if j <= n_stress {
                let lo = (j - 1) * chunk;
                let hi = (lo + chunk).min(n);
                head[2] = stress_term(model, &inputs[lo * d..hi * d], &targets[lo * d..hi * d], w.w_s, 1.0 / n as f64, Some(g));
            } else {
                let o = j - 1 - n_stress;
                let lo = o * orbit_chunk;
                let hi = (lo + orbit_chunk).min(orbits.len());
                let parts = orbit_penalty(model, &orbits[lo..hi], side, &w, c.square_energy, scale, false, Some(g));
                head[3] = parts.energy;
                head[4] = parts.stress;
                head[5] = parts.tangent;
            }
            out
        };
        let total = reduce_sum(exec.map(n_jobs, &job), 6 + np);
        let pen = PenaltyParts { energy: total[3], stress: total[4], tangent: total[5] };
        ([total[0], total[1], total[2]], pen, total[6..].to_vec())
    }

    fn finish_epoch(&self, exec: &dyn Executor, acc: &mut EpochRecord) {
        let ds = self.dataset;
        let d = ds.dim();
        let model = &self.model;
        let val = &ds.validation;
        let chunk = self.config.chunk_size.max(1) * 4;
        let w_s = self.config.weights.w_s;
        if !val.is_empty() {
            let n = val.len();
            let job = |j: usize| -> Vec<f64> {
                let lo = j * chunk;
                let hi = (lo + chunk).min(n);
                let mut x = Vec::with_capacity((hi - lo) * d);
                let mut s = Vec::with_capacity((hi - lo) * d);
                for &i in &val[lo..hi] {
                    x.extend_from_slice(ds.input(i));
                    s.extend_from_slice(ds.stress(i));
                }
                vec![stress_term(model, &x, &s, w_s, 1.0 / n as f64, None)]
            };
            acc.val_stress = reduce_sum(exec.map(n.div_ceil(chunk), &job), 1)[0];
        }
        if let Some(m) = &self.metrics {
            let w = LossWeights::default();
            let sq = self.config.constraint.square_energy;
            let group = |orbits: &[Orbit], side: Side, scale: f64| {
                let job = |j: usize| -> Vec<f64> {
                    let lo = j * 8;
                    let hi = (lo + 8).min(orbits.len());
                    let p = orbit_penalty(model, &orbits[lo..hi], side, &w, sq, scale, true, None);
                    vec![p.energy, p.stress, p.tangent]
                };
                reduce_sum(exec.map(orbits.len().div_ceil(8), &job), 3)
            };
            let n_rot: usize = m.frame.iter().map(|o| o.rotations.len()).sum();
            if n_rot > 0 {
                let f = group(&m.frame, Side::Spatial, 1.0 / n_rot as f64);
                acc.frame_energy = Some(f[0]);
                acc.frame_stress = Some(f[1]);
                acc.frame_tangent = Some(f[2]);
            }
            if !m.symmetry.is_empty() {
                let s = group(&m.symmetry, Side::Referential, 1.0 / m.symmetry.len() as f64);
                acc.sym_energy = Some(s[0]);
                acc.sym_stress = Some(s[1]);
                acc.sym_tangent = Some(s[2]);
            }
        }
    }
}

/// Trains `model` on `dataset` for `config.epochs` epochs.
pub fn train(model: ModelBundle, dataset: &Dataset, config: &TrainConfig, exec: &dyn Executor) -> Result<(ModelBundle, LossTrace)> {
    let mut t = Trainer::new(model, dataset, *config)?;
    t.run(exec)?;
    Ok(t.into_parts())
}

/// Continues training a P–F model with the selected constraint penalty added
/// to the stress loss, from a fresh optimiser state.
pub fn transfer_train(
    model: ModelBundle,
    dataset: &Dataset,
    config: &TrainConfig,
    kind: ConstraintKind,
    exec: &dyn Executor,
) -> Result<(ModelBundle, LossTrace)> {
    if model.pair != ConjugatePair::PF {
        return Err(Error::Variant { expected: ConjugatePair::PF.name(), got: model.pair.name() });
    }
    let mut cfg = *config;
    cfg.constraint.kind = kind;
    train(model, dataset, &cfg, exec)
}

/// Fresh model whose normaliser matches the dataset.
pub fn init_for_dataset(seed: u64, dataset: &Dataset, net: crate::energy::NetConfig) -> ModelBundle {
    let mut m = ModelBundle::init_with(seed, dataset.pair, net);
    m.normalizer = dataset.normalizer.clone();
    m
}
