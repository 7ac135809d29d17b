//! Strain-controlled loading protocols.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{DeformationGradient, Tensor2};

/// Bound on total strain along one axis or tilt for uniaxial and shear paths.
pub const UNIAXIAL_BOUND: f64 = 0.3;
/// Bound on total strain per axis for biaxial paths.
pub const BIAXIAL_BOUND: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathKind {
    UniaxialCompression { axis: usize },
    UniaxialTension { axis: usize },
    /// Tilt `F_ij`, `i < j`, positive or negative.
    Shear { i: usize, j: usize, positive: bool },
    /// Simultaneous compression of two axes, each at half the path rate.
    BiaxialCompression { a: usize, b: usize },
}

impl PathKind {
    pub fn label(&self) -> String {
        match *self {
            PathKind::UniaxialCompression { axis } => format!("uniaxial-compression-x{}", axis + 1),
            PathKind::UniaxialTension { axis } => format!("uniaxial-tension-x{}", axis + 1),
            PathKind::Shear { i, j, positive } => {
                format!("shear-{}{}{}", i + 1, j + 1, if positive { "-pos" } else { "-neg" })
            }
            PathKind::BiaxialCompression { a, b } => format!("biaxial-compression-x{}x{}", a + 1, b + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadingPath {
    pub kind: PathKind,
    /// Strain per ps.
    pub rate: f64,
    /// ps.
    pub duration: f64,
    /// ps between records.
    pub interval: f64,
}

impl LoadingPath {
    pub const DEFAULT_RATE: f64 = 0.001;
    pub const DEFAULT_DURATION: f64 = 300.0;
    pub const DEFAULT_INTERVAL: f64 = 0.2;

    pub fn new(kind: PathKind) -> Self {
        Self { kind, rate: Self::DEFAULT_RATE, duration: Self::DEFAULT_DURATION, interval: Self::DEFAULT_INTERVAL }
    }

    /// Number of records including `t = 0`.
    pub fn n_records(&self) -> usize {
        if self.duration <= 0.0 {
            1
        } else {
            math::floor(self.duration / self.interval + 1e-9) as usize + 1
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_records()).map(|n| n as f64 * self.interval).collect()
    }

    /// Total strain magnitude per loaded axis.
    pub fn total_strain(&self) -> f64 {
        let per_axis = match self.kind {
            PathKind::BiaxialCompression { .. } => 0.5 * self.rate,
            _ => self.rate,
        };
        per_axis * self.duration.max(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let axis_ok = |a: usize| a < 3;
        let ok = match self.kind {
            PathKind::UniaxialCompression { axis } | PathKind::UniaxialTension { axis } => axis_ok(axis),
            PathKind::Shear { i, j, .. } => axis_ok(j) && i < j,
            PathKind::BiaxialCompression { a, b } => axis_ok(b) && a < b,
        };
        if !ok {
            return Err(Error::Protocol(format!("invalid axes for {:?}", self.kind)));
        }
        if !(self.rate >= 0.0) || !(self.duration >= 0.0) || !(self.interval > 0.0) {
            return Err(Error::Protocol("rate and duration must be non-negative and the interval positive".into()));
        }
        let bound = match self.kind {
            PathKind::BiaxialCompression { .. } => BIAXIAL_BOUND,
            _ => UNIAXIAL_BOUND,
        };
        let total = self.total_strain();
        if total > bound * (1.0 + 1e-9) {
            return Err(Error::Protocol(format!("total strain {total} exceeds the bound {bound}")));
        }
        Ok(())
    }

    /// `F` at time `t`.
    pub fn deformation_at(&self, t: f64) -> Tensor2 {
        let mut f = Tensor2::IDENTITY;
        match self.kind {
            PathKind::UniaxialCompression { axis } => f.0[axis][axis] -= self.rate * t,
            PathKind::UniaxialTension { axis } => f.0[axis][axis] += self.rate * t,
            PathKind::Shear { i, j, positive } => f.0[i][j] = if positive { 1.0 } else { -1.0 } * self.rate * t,
            PathKind::BiaxialCompression { a, b } => {
                f.0[a][a] -= 0.5 * self.rate * t;
                f.0[b][b] -= 0.5 * self.rate * t;
            }
        }
        f
    }
}

/// Deformation gradients along the path, one per record.
pub fn generate_path(spec: &LoadingPath) -> Result<Vec<DeformationGradient>> {
    spec.validate()?;
    spec.times().into_iter().map(|t| DeformationGradient::new(spec.deformation_at(t))).collect()
}

/// Fifteen protocols: compression and tension on each axis, both shear signs
/// on each tilt, compression on each axis pair.
pub fn default_paths() -> Vec<LoadingPath> {
    let mut kinds = Vec::new();
    for axis in 0..3 {
        kinds.push(PathKind::UniaxialCompression { axis });
    }
    for axis in 0..3 {
        kinds.push(PathKind::UniaxialTension { axis });
    }
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        kinds.push(PathKind::Shear { i, j, positive: true });
        kinds.push(PathKind::Shear { i, j, positive: false });
    }
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        kinds.push(PathKind::BiaxialCompression { a, b });
    }
    kinds.into_iter().map(LoadingPath::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniaxial_endpoints() {
        let c = generate_path(&LoadingPath::new(PathKind::UniaxialCompression { axis: 0 })).unwrap();
        assert_eq!(c.len(), 1501);
        assert!((c.last().unwrap().tensor()[(0, 0)] - 0.7).abs() < 1e-12);
        let t = generate_path(&LoadingPath::new(PathKind::UniaxialTension { axis: 0 })).unwrap();
        assert!((t.last().unwrap().tensor()[(0, 0)] - 1.3).abs() < 1e-12);
    }

    #[test]
    fn biaxial_endpoints() {
        let p = generate_path(&LoadingPath::new(PathKind::BiaxialCompression { a: 0, b: 1 })).unwrap();
        let f = p.last().unwrap().tensor();
        assert!((f[(0, 0)] - 0.85).abs() < 1e-12 && (f[(1, 1)] - 0.85).abs() < 1e-12);
        assert_eq!(f[(2, 2)], 1.0);
    }

    #[test]
    fn zero_duration_and_bounds() {
        let mut p = LoadingPath::new(PathKind::Shear { i: 0, j: 2, positive: false });
        p.duration = 0.0;
        let f = generate_path(&p).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(*f[0].tensor(), Tensor2::IDENTITY);
        p.duration = 301.0;
        assert!(matches!(generate_path(&p), Err(Error::Protocol(_))));
        let mut b = LoadingPath::new(PathKind::BiaxialCompression { a: 1, b: 2 });
        b.rate = 0.0011;
        assert!(generate_path(&b).is_err());
    }

    #[test]
    fn default_set_is_admissible() {
        let paths = default_paths();
        assert_eq!(paths.len(), 15);
        let mut labels: Vec<_> = paths.iter().map(|p| p.kind.label()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 15);
        for p in &paths {
            for f in generate_path(p).unwrap() {
                assert!(f.jacobian() > 0.0);
            }
        }
    }
}
