use alloc::string::String;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid kinematics: {0}")]
    InvalidKinematics(String),
    #[error("spectral domain error: {0}")]
    SpectralDomain(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate crystal basis: {0}")]
    DegenerateBasis(String),
    #[error("degenerate symmetry axis")]
    DegenerateAxis,
    #[error("shape mismatch: expected {expected} components, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("loading protocol violation: {0}")]
    Protocol(String),
    #[error("filter window {window} requires more than {window} records, got {len}")]
    Window { window: usize, len: usize },
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("variant mismatch: expected {expected}, got {got}")]
    Variant { expected: &'static str, got: &'static str },
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("series did not converge: tail norm {tail:e} above tolerance {tol:e}")]
    SeriesNotConverged { tail: f64, tol: f64 },
    #[error("pressure {target} GPa not bracketed by the compression path (reached {reached} GPa)")]
    PressureRange { target: f64, reached: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
