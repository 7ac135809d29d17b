//! Finite-strain kinematics: strain measures, rotations, crystal bases and
//! stress push-forward.

use alloc::format;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::second::{cross3, dot3, norm3, scale3, Tensor2, Vec3};
use crate::error::{Error, Result};
use crate::math;

/// Deformation gradient with `det F > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Tensor2", into = "Tensor2")]
pub struct DeformationGradient(Tensor2);

impl DeformationGradient {
    pub fn new(f: Tensor2) -> Result<Self> {
        if !f.is_finite() {
            return Err(Error::InvalidKinematics("non-finite component".into()));
        }
        let j = f.det();
        if !(j > 0.0) {
            return Err(Error::InvalidKinematics(format!("det F = {j:e} is not positive")));
        }
        Ok(Self(f))
    }

    pub fn identity() -> Self {
        Self(Tensor2::IDENTITY)
    }

    pub fn tensor(&self) -> &Tensor2 {
        &self.0
    }

    /// Volume ratio `J = det F`.
    pub fn jacobian(&self) -> f64 {
        self.0.det()
    }

    pub fn inverse(&self) -> Tensor2 {
        // det > 0 is guaranteed at construction.
        self.0.inverse().unwrap_or(Tensor2::ZERO)
    }

    /// Right Cauchy–Green tensor `C = FᵀF`.
    pub fn right_cauchy_green(&self) -> Tensor2 {
        self.0.transpose().dot(&self.0)
    }
}

impl TryFrom<Tensor2> for DeformationGradient {
    type Error = Error;
    fn try_from(t: Tensor2) -> Result<Self> {
        Self::new(t)
    }
}

impl From<DeformationGradient> for Tensor2 {
    fn from(f: DeformationGradient) -> Tensor2 {
        f.0
    }
}

/// Proper orthogonal tensor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation(Tensor2);

impl Rotation {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(q: Tensor2) -> Result<Self> {
        let err = (q.transpose().dot(&q) - Tensor2::IDENTITY).max_abs();
        let det = q.det();
        if err > Self::TOLERANCE || math::abs(det - 1.0) > Self::TOLERANCE {
            return Err(Error::Domain(format!(
                "not a rotation: |QᵀQ - I| = {err:e}, det = {det}"
            )));
        }
        Ok(Self(q))
    }

    pub fn identity() -> Self {
        Self(Tensor2::IDENTITY)
    }

    pub fn tensor(&self) -> &Tensor2 {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0.dot(&other.0))
    }

    /// Uniform (Haar) sample from normalised Gaussian quaternions.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
        loop {
            let q: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n = math::sqrt(q.iter().map(|x| x * x).sum());
            if n > 1e-12 {
                return Rotation::from_quaternion([q[0] / n, q[1] / n, q[2] / n, q[3] / n]);
            }
        }
    }

    /// Unit quaternion `(w, x, y, z)`.
    pub fn from_quaternion(q: [f64; 4]) -> Rotation {
        let [w, x, y, z] = q;
        Rotation(Tensor2([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]))
    }

    /// Intrinsic Z-Y-X angles `(yaw, pitch, roll)` with `Q = Rz(yaw) Ry(pitch) Rx(roll)`.
    pub fn to_zyx(&self) -> [f64; 3] {
        zyx_angles(&self.0)
    }

    pub fn from_zyx(angles: [f64; 3]) -> Rotation {
        let [yaw, pitch, roll] = angles;
        let (sy, cy) = (math::sin(yaw), math::cos(yaw));
        let (sp, cp) = (math::sin(pitch), math::cos(pitch));
        let (sr, cr) = (math::sin(roll), math::cos(roll));
        Rotation(Tensor2([
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]))
    }
}

/// Z-Y-X angles `(yaw, pitch, roll)` of an orthogonal matrix.
pub fn zyx_angles(q: &Tensor2) -> [f64; 3] {
    let r = &q.0;
    let pitch = math::asin((-r[2][0]).clamp(-1.0, 1.0));
    let yaw = math::atan2(r[1][0], r[0][0]);
    let roll = math::atan2(r[2][1], r[2][2]);
    [yaw, pitch, roll]
}

/// Unit quaternion `(w, x, y, z)` with `w ≥ 0` of a proper orthogonal matrix.
pub fn quaternion_of(q: &Tensor2) -> [f64; 4] {
    let r = &q.0;
    let tr = r[0][0] + r[1][1] + r[2][2];
    // branch on the largest component for conditioning
    let mut out = if tr > r[0][0].max(r[1][1]).max(r[2][2]) {
        let s = 2.0 * math::sqrt(1.0 + tr);
        [0.25 * s, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s]
    } else if r[0][0] >= r[1][1] && r[0][0] >= r[2][2] {
        let s = 2.0 * math::sqrt(1.0 + r[0][0] - r[1][1] - r[2][2]);
        [(r[2][1] - r[1][2]) / s, 0.25 * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s]
    } else if r[1][1] >= r[2][2] {
        let s = 2.0 * math::sqrt(1.0 + r[1][1] - r[0][0] - r[2][2]);
        [(r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, 0.25 * s, (r[1][2] + r[2][1]) / s]
    } else {
        let s = 2.0 * math::sqrt(1.0 + r[2][2] - r[0][0] - r[1][1]);
        [(r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, 0.25 * s]
    };
    if out[0] < 0.0 {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    out
}

/// Unit vector `‖N‖ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitVector(Vec3);

impl UnitVector {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = norm3(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain("cannot normalise a zero vector".into()));
        }
        Ok(Self(scale3(&v, 1.0 / n)))
    }

    /// `N(φ, θ) = sinφ cosθ e₁ + sinφ sinθ e₂ + cosφ e₃`, φ polar and θ azimuthal.
    pub fn from_spherical(phi: f64, theta: f64) -> Self {
        let s = math::sin(phi);
        Self([s * math::cos(theta), s * math::sin(theta), math::cos(phi)])
    }

    pub fn as_array(&self) -> &Vec3 {
        &self.0
    }
}

/// Green strain `E = ½(FᵀF − I)`.
pub fn green_strain(f: &DeformationGradient) -> Tensor2 {
    (f.right_cauchy_green() - Tensor2::IDENTITY) * 0.5
}

/// Logarithmic strain `ε = ½ ln C` of a symmetric positive-definite `C`.
pub fn log_strain(c: &Tensor2) -> Result<Tensor2> {
    if !c.is_symmetric(1e-12 * c.max_abs().max(1.0)) {
        return Err(Error::SpectralDomain("C is not symmetric".into()));
    }
    let e = c.sym_eigen();
    if !(e.values[2] > 0.0) {
        return Err(Error::SpectralDomain(format!(
            "C is not positive definite (smallest eigenvalue {:e})",
            e.values[2]
        )));
    }
    Ok(e.reassemble(&[
        0.5 * math::ln(e.values[0]),
        0.5 * math::ln(e.values[1]),
        0.5 * math::ln(e.values[2]),
    ]))
}

/// Matrix exponential of a symmetric tensor.
pub fn exp_sym(a: &Tensor2) -> Tensor2 {
    a.map_spectral(math::exp)
}

/// Skew tensor `spn(θ) = −ε·θ`, i.e. `spn(θ)·v = θ × v`.
pub fn spn(theta: &Vec3) -> Tensor2 {
    Tensor2([
        [0.0, -theta[2], theta[1]],
        [theta[2], 0.0, -theta[0]],
        [-theta[1], theta[0], 0.0],
    ])
}

/// Finite rotation map `I + (sinθ/θ) spn + ((1 − cosθ)/θ²) spn²`.
pub fn rotation_exp(theta: &Vec3) -> Rotation {
    let t2 = dot3(theta, theta);
    let t = math::sqrt(t2);
    let (a, b) = if t < 1e-6 {
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        (math::sin(t) / t, (1.0 - math::cos(t)) / t2)
    };
    let w = spn(theta);
    Rotation(Tensor2::IDENTITY + w * a + w.dot(&w) * b)
}

/// Covariant crystal basis `M₁, M₂, M₃` with its contravariant dual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrystalBasis {
    pub covariant: [Vec3; 3],
    pub contravariant: [Vec3; 3],
}

impl CrystalBasis {
    pub fn new(covariant: [Vec3; 3]) -> Result<Self> {
        let [m1, m2, m3] = covariant;
        let vol = dot3(&m1, &cross3(&m2, &m3));
        let scale = norm3(&m1) * norm3(&m2) * norm3(&m3);
        if !(scale > 0.0) || math::abs(vol) <= 1e-10 * scale {
            return Err(Error::DegenerateBasis("crystal vectors are coplanar".into()));
        }
        let contravariant = [
            scale3(&cross3(&m2, &m3), 1.0 / vol),
            scale3(&cross3(&m3, &m1), 1.0 / vol),
            scale3(&cross3(&m1, &m2), 1.0 / vol),
        ];
        Ok(Self { covariant, contravariant })
    }

    /// Lattice vectors from cell constants (Å, degrees) with a ∥ x, b in the
    /// xy-plane and c in the +z half-space.
    pub fn from_lattice(a: f64, b: f64, c: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let deg = core::f64::consts::PI / 180.0;
        let (ca, cb, cg) = (math::cos(alpha * deg), math::cos(beta * deg), math::cos(gamma * deg));
        let sg = math::sin(gamma * deg);
        let va = [a, 0.0, 0.0];
        let vb = [b * cg, b * sg, 0.0];
        let cx = c * cb;
        let cy = c * (ca - cb * cg) / sg;
        let cz2 = c * c - cx * cx - cy * cy;
        if !(cz2 > 0.0) {
            return Err(Error::DegenerateBasis("cell angles admit no +z component for c".into()));
        }
        Self::new([va, vb, [cx, cy, math::sqrt(cz2)]])
    }

    /// Monoclinic β-HMX cell (P2₁/n): a = 6.53 Å, b = 11.03 Å, c = 7.35 Å, β = 102.689°.
    pub fn beta_hmx() -> Self {
        Self::from_lattice(6.53, 11.03, 7.35, 90.0, 102.689, 90.0).expect("valid cell")
    }

    /// Two-fold axis direction (the b axis).
    pub fn unique_axis(&self) -> Vec3 {
        self.covariant[1]
    }
}

/// Monoclinic stretch parameters `U = Σ aᵢ Mᵢ⊗Mⁱ + a₄ (M₁⊗M³ + M₃⊗M¹)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonoclinicStretch {
    pub a: [f64; 4],
}

impl MonoclinicStretch {
    pub fn identity() -> Self {
        Self { a: [1.0, 1.0, 1.0, 0.0] }
    }

    pub fn tensor(&self, basis: &CrystalBasis) -> Tensor2 {
        let [m1, m2, m3] = basis.covariant;
        let [d1, d2, d3] = basis.contravariant;
        Tensor2::outer(&m1, &d1) * self.a[0]
            + Tensor2::outer(&m2, &d2) * self.a[1]
            + Tensor2::outer(&m3, &d3) * self.a[2]
            + (Tensor2::outer(&m1, &d3) + Tensor2::outer(&m3, &d1)) * self.a[3]
    }
}

/// Deformation gradient `F = R·U` preserving the monoclinic cell.
pub fn monoclinic_f(
    stretch: &MonoclinicStretch,
    r: &Rotation,
    basis: &CrystalBasis,
) -> Result<DeformationGradient> {
    let u = stretch.tensor(basis);
    DeformationGradient::new(r.tensor().dot(&u))
}

/// Symmetry rotation `exp[kπ spn(m₂)/‖m₂‖]` about the current two-fold axis `m₂ = F·M₂`.
pub fn monoclinic_symmetry_rotation(f: &DeformationGradient, m2: &Vec3, k: i32) -> Result<Rotation> {
    let axis = f.tensor().apply(m2);
    let n = norm3(&axis);
    if !(n > 0.0) {
        return Err(Error::DegenerateAxis);
    }
    let angle = core::f64::consts::PI * f64::from(k);
    Ok(rotation_exp(&scale3(&axis, angle / n)))
}

/// Non-trivial elements of the monoclinic group at `F` (only `k = 1`; the group is 2-periodic).
pub fn monoclinic_symmetry_rotations(f: &DeformationGradient, m2: &Vec3) -> Result<alloc::vec::Vec<Rotation>> {
    Ok(alloc::vec![monoclinic_symmetry_rotation(f, m2, 1)?])
}

/// Cauchy stress `σ = J⁻¹ F S Fᵀ`.
pub fn push_forward_stress(s: &Tensor2, f: &DeformationGradient) -> Tensor2 {
    let ft = f.tensor();
    ft.dot(s).dot(&ft.transpose()) * (1.0 / f.jacobian())
}

/// Second Piola–Kirchhoff stress `S = J F⁻¹ σ F⁻ᵀ`.
pub fn pull_back_stress(sigma: &Tensor2, f: &DeformationGradient) -> Tensor2 {
    let fi = f.inverse();
    fi.dot(sigma).dot(&fi.transpose()) * f.jacobian()
}
