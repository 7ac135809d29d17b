//! Versioned JSON for models, checkpoints and datasets; numeric arrays are base64.

use std::path::Path;

use hyperelastic_core::data::Dataset;
use hyperelastic_core::energy::{Activation, ConjugatePair, Dense, EnergyNet, Layer, ModelBundle, Normalizer, Provenance};
use hyperelastic_core::train::{Checkpoint, LossTrace, Nadam, NadamConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::b64::F64s;
use super::fs::{read_string, write_atomic};
use crate::error::{Error, Result};

pub const MODEL_VERSION: u64 = 1;
pub const DATASET_VERSION: u64 = 1;
pub const CHECKPOINT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct DenseFile {
    inputs: usize,
    outputs: usize,
    activation: Activation,
    weights: F64s,
    bias: F64s,
}

impl From<&Dense> for DenseFile {
    fn from(d: &Dense) -> Self {
        Self {
            inputs: d.inputs,
            outputs: d.outputs,
            activation: d.activation,
            weights: d.weights.as_slice().into(),
            bias: d.bias.as_slice().into(),
        }
    }
}

impl From<DenseFile> for Dense {
    fn from(d: DenseFile) -> Self {
        Dense { inputs: d.inputs, outputs: d.outputs, activation: d.activation, weights: d.weights.0, bias: d.bias.0 }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LayerFile {
    Dense(DenseFile),
    Multiply,
    Product { left: DenseFile, right: DenseFile },
}

#[derive(Serialize, Deserialize)]
struct NormalizerFile {
    input_min: F64s,
    input_max: F64s,
    stress_min: F64s,
    stress_max: F64s,
}

impl From<&Normalizer> for NormalizerFile {
    fn from(n: &Normalizer) -> Self {
        Self {
            input_min: n.input_min.as_slice().into(),
            input_max: n.input_max.as_slice().into(),
            stress_min: n.stress_min.as_slice().into(),
            stress_max: n.stress_max.as_slice().into(),
        }
    }
}

impl From<NormalizerFile> for Normalizer {
    fn from(n: NormalizerFile) -> Self {
        Normalizer { input_min: n.input_min.0, input_max: n.input_max.0, stress_min: n.stress_min.0, stress_max: n.stress_max.0 }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelBody {
    pair: ConjugatePair,
    provenance: Provenance,
    input_dim: usize,
    normalizer: NormalizerFile,
    layers: Vec<LayerFile>,
}

impl From<&ModelBundle> for ModelBody {
    fn from(m: &ModelBundle) -> Self {
        Self {
            pair: m.pair,
            provenance: m.provenance.clone(),
            input_dim: m.net.input_dim,
            normalizer: (&m.normalizer).into(),
            layers: m
                .net
                .layers
                .iter()
                .map(|l| match l {
                    Layer::Dense(d) => LayerFile::Dense(d.into()),
                    Layer::Multiply => LayerFile::Multiply,
                    Layer::Product { left, right } => LayerFile::Product { left: left.into(), right: right.into() },
                })
                .collect(),
        }
    }
}

impl ModelBody {
    fn into_model(self) -> ModelBundle {
        ModelBundle {
            pair: self.pair,
            net: EnergyNet {
                input_dim: self.input_dim,
                layers: self
                    .layers
                    .into_iter()
                    .map(|l| match l {
                        LayerFile::Dense(d) => Layer::Dense(d.into()),
                        LayerFile::Multiply => Layer::Multiply,
                        LayerFile::Product { left, right } => Layer::Product { left: left.into(), right: right.into() },
                    })
                    .collect(),
            },
            normalizer: self.normalizer.into(),
            provenance: self.provenance,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u64,
    #[serde(flatten)]
    body: T,
}

#[derive(Deserialize)]
struct Header {
    format: Option<String>,
    version: Option<u64>,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

fn wrap<T: Serialize>(format: &str, version: u64, body: T) -> Result<Vec<u8>> {
    to_json(&Envelope { format: format.into(), version, body })
}

fn unwrap<T: DeserializeOwned>(text: &str, path: &Path, format: &'static str, version: u64) -> Result<T> {
    let h: Header = serde_json::from_str(text).map_err(|e| Error::json(path, &e))?;
    if h.format.as_deref() != Some(format) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: format!("expected format '{format}', found {:?}", h.format),
        });
    }
    let found = h.version.unwrap_or(0);
    if found != version {
        return Err(Error::UnsupportedVersion { path: path.to_path_buf(), what: format, found, expected: version });
    }
    let env: Envelope<T> = serde_json::from_str(text).map_err(|e| Error::json(path, &e))?;
    Ok(env.body)
}

pub fn model_to_json(m: &ModelBundle) -> Result<Vec<u8>> {
    wrap("hyperelastic-model", MODEL_VERSION, ModelBody::from(m))
}

pub fn parse_model(text: &str, path: &Path) -> Result<ModelBundle> {
    let body: ModelBody = unwrap(text, path, "hyperelastic-model", MODEL_VERSION)?;
    let m = body.into_model();
    m.validate()?;
    Ok(m)
}

pub fn write_model(path: &Path, m: &ModelBundle) -> Result<()> {
    write_atomic(path, &model_to_json(m)?)
}

pub fn read_model(path: &Path) -> Result<ModelBundle> {
    parse_model(&read_string(path)?, path)
}

#[derive(Serialize, Deserialize)]
struct DatasetBody {
    pair: ConjugatePair,
    n: usize,
    inputs: F64s,
    stresses: F64s,
    train: Vec<usize>,
    validation: Vec<usize>,
    reference: F64s,
    min_jacobian: f64,
    normalizer: NormalizerFile,
}

pub fn dataset_to_json(d: &Dataset) -> Result<Vec<u8>> {
    wrap(
        "hyperelastic-dataset",
        DATASET_VERSION,
        DatasetBody {
            pair: d.pair,
            n: d.len(),
            inputs: d.inputs.as_slice().into(),
            stresses: d.stresses.as_slice().into(),
            train: d.train.clone(),
            validation: d.validation.clone(),
            reference: d.reference.as_slice().into(),
            min_jacobian: d.min_jacobian,
            normalizer: (&d.normalizer).into(),
        },
    )
}

pub fn parse_dataset(text: &str, path: &Path) -> Result<Dataset> {
    let b: DatasetBody = unwrap(text, path, "hyperelastic-dataset", DATASET_VERSION)?;
    let d = Dataset {
        pair: b.pair,
        inputs: b.inputs.0,
        stresses: b.stresses.0,
        train: b.train,
        validation: b.validation,
        reference: b.reference.0,
        min_jacobian: b.min_jacobian,
        normalizer: b.normalizer.into(),
    };
    if d.len() != b.n {
        return Err(Error::Data(format!("{}: record count disagrees with arrays", path.display())));
    }
    d.validate()?;
    Ok(d)
}

pub fn write_dataset(path: &Path, d: &Dataset) -> Result<()> {
    write_atomic(path, &dataset_to_json(d)?)
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&read_string(path)?, path)
}

#[derive(Serialize, Deserialize)]
struct OptimizerFile {
    config: NadamConfig,
    m: F64s,
    v: F64s,
    m_schedule: f64,
    step: u64,
}

#[derive(Serialize, Deserialize)]
struct CheckpointBody {
    epoch: usize,
    model: ModelBody,
    optimizer: OptimizerFile,
    trace: LossTrace,
}

pub fn checkpoint_to_json(c: &Checkpoint) -> Result<Vec<u8>> {
    wrap(
        "hyperelastic-checkpoint",
        CHECKPOINT_VERSION,
        CheckpointBody {
            epoch: c.epoch,
            model: (&c.model).into(),
            optimizer: OptimizerFile {
                config: c.optimizer.config,
                m: c.optimizer.m.as_slice().into(),
                v: c.optimizer.v.as_slice().into(),
                m_schedule: c.optimizer.m_schedule,
                step: c.optimizer.step,
            },
            trace: c.trace.clone(),
        },
    )
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = read_string(path)?;
    let b: CheckpointBody = unwrap(&text, path, "hyperelastic-checkpoint", CHECKPOINT_VERSION)?;
    let o = b.optimizer;
    Ok(Checkpoint {
        model: b.model.into_model(),
        optimizer: Nadam { config: o.config, m: o.m.0, v: o.v.0, m_schedule: o.m_schedule, step: o.step },
        epoch: b.epoch,
        trace: b.trace,
    })
}
