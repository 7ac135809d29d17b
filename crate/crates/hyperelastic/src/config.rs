//! Resolved run configurations; each run stores one next to its outputs.

use std::path::{Path, PathBuf};

use hyperelastic_core::data::LoadingPath;
use hyperelastic_core::energy::{ConjugatePair, NetConfig};
use hyperelastic_core::train::{ConstraintKind, TrainConfig};
use hyperelastic_core::validate::{EllipticityConfig, GROWTH_THRESHOLD};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{read_string, to_json};

pub const RUN_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truth {
    /// Literal table placement (two-fold axis along e1).
    Literature,
    /// Same tensor with its two-fold axis along e2.
    LiteratureBAxis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenDataConfig {
    pub paths: Vec<LoadingPath>,
    pub truth: Truth,
    pub noise_amplitude: f64,
    pub noise_correlation: f64,
    /// Path `k` uses noise seed `seed + k`.
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub inputs: Vec<PathBuf>,
    pub window: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub inputs: Vec<PathBuf>,
    pub pair: ConjugatePair,
    pub split: f64,
    pub seed: u64,
    /// Keep every `stride`-th record of each partition.
    pub stride: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitConfig {
    pub seed: u64,
    pub net: NetConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRunConfig {
    pub dataset: PathBuf,
    /// Start from this model instead of a fresh initialisation.
    pub model: Option<PathBuf>,
    pub init: InitConfig,
    pub train: TrainConfig,
    pub checkpoint_every: Option<usize>,
    pub resume: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRunConfig {
    pub model: PathBuf,
    pub dataset: PathBuf,
    pub constraint: ConstraintKind,
    pub train: TrainConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Audit {
    All,
    Ellipticity,
    Growth,
    Convexity,
    Anisotropy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateConfig {
    pub model: PathBuf,
    pub which: Audit,
    /// Supplies the minimum training `det F` for the growth report.
    pub dataset: Option<PathBuf>,
    pub ellipticity: EllipticityConfig,
    /// Monoclinic grid nodes per parameter for the state-range search; 0 checks `F = I` only.
    pub grid_per_axis: usize,
    pub stretch_range: f64,
    pub sweep_max: f64,
    pub sweep_steps: usize,
    pub convexity_pairs: usize,
    pub convexity_bound: f64,
    pub growth_points: usize,
    pub growth_min_j: f64,
    pub growth_threshold: f64,
}

impl ValidateConfig {
    pub fn defaults(model: PathBuf) -> Self {
        Self {
            model,
            which: Audit::All,
            dataset: None,
            ellipticity: EllipticityConfig::default(),
            grid_per_axis: 5,
            stretch_range: 0.15,
            sweep_max: 0.15,
            sweep_steps: 30,
            convexity_pairs: 200,
            convexity_bound: 0.15,
            growth_points: 61,
            growth_min_j: 1e-6,
            growth_threshold: GROWTH_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentsConfig {
    pub model: PathBuf,
    /// GPa.
    pub pressures: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    GenData(GenDataConfig),
    Filter(FilterConfig),
    Dataset(DatasetConfig),
    Train(TrainRunConfig),
    Transfer(TransferRunConfig),
    Validate(ValidateConfig),
    Tangents(TangentsConfig),
}

#[derive(Serialize, Deserialize)]
struct RunFile {
    format: String,
    version: u64,
    #[serde(flatten)]
    run: RunConfig,
}

pub const RUN_FILE: &str = "run.json";

pub fn run_to_json(run: &RunConfig) -> Result<Vec<u8>> {
    to_json(&RunFile { format: "hyperelastic-run".into(), version: RUN_VERSION, run: run.clone() })
}

pub fn read_run(path: &Path) -> Result<RunConfig> {
    let text = read_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::json(path, &e))?;
    let found = v.get("version").and_then(|x| x.as_u64()).unwrap_or(0);
    if found != RUN_VERSION {
        return Err(Error::UnsupportedVersion { path: path.to_path_buf(), what: "run configuration", found, expected: RUN_VERSION });
    }
    let f: RunFile = serde_json::from_str(&text).map_err(|e| Error::json(path, &e))?;
    Ok(f.run)
}

/// Reads a standalone training configuration (`TrainConfig` fields, all optional).
pub fn read_train_config(path: &Path) -> Result<TrainConfig> {
    let text = read_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, &e))
}

/// Hex SHA-256 of the JSON encoding of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable config");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}
