//! Loading protocols, synthetic stress histories, spectral filtering and datasets.

mod dataset;
mod filter;
mod paths;
pub mod stiffness;
mod synth;

pub use dataset::{build_dataset, Dataset};
pub use filter::{euler_track, filter_series, filter_tensors, moving_average, spectral_track, SpectralTrack, DEFAULT_WINDOW};
pub use paths::{default_paths, generate_path, LoadingPath, PathKind, BIAXIAL_BOUND, UNIAXIAL_BOUND};
pub use synth::{synthesize_stress, GroundTruthModel, NoiseModel, Record, SeriesMeta, StressSeries};
