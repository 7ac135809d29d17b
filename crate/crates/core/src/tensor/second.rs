//! Second-order 3×3 tensors and small vector helpers.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::math;

pub type Vec3 = [f64; 3];

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: &Vec3) -> f64 {
    math::sqrt(dot3(a, a))
}

pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Voigt pairs in storage order (11, 22, 33, 12, 23, 13).
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

/// Voigt slot of the symmetric index pair `(i, j)`.
pub const fn voigt_index(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) | (1, 0) => 3,
        (1, 2) | (2, 1) => 4,
        _ => 5,
    }
}

/// Row-major 3×3 tensor. Components are dimensionless or GPa depending on role.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Tensor2(pub [[f64; 3]; 3]);

impl Tensor2 {
    pub const ZERO: Tensor2 = Tensor2([[0.0; 3]; 3]);
    pub const IDENTITY: Tensor2 = Tensor2([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    pub fn from_diag(d: [f64; 3]) -> Self {
        Tensor2([[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]])
    }

    /// Row-major nine components.
    pub fn from_slice(c: &[f64]) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = c[3 * i + j];
            }
        }
        t
    }

    pub fn to_array(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[i][j];
            }
        }
        out
    }

    /// Symmetric tensor from components in Voigt order (no shear factor).
    pub fn from_voigt(v: &[f64]) -> Self {
        let mut t = Self::ZERO;
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            t.0[i][j] = v[a];
            t.0[j][i] = v[a];
        }
        t
    }

    /// Voigt components of the symmetric part.
    pub fn to_voigt(&self) -> [f64; 6] {
        let mut v = [0.0; 6];
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            v[a] = 0.5 * (self.0[i][j] + self.0[j][i]);
        }
        v
    }

    pub fn outer(a: &Vec3, b: &Vec3) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = a[i] * b[j];
            }
        }
        t
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn sym(&self) -> Self {
        (*self + self.transpose()) * 0.5
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let a = &self.0;
        let mut inv = Self::ZERO;
        inv.0[0][0] = a[1][1] * a[2][2] - a[1][2] * a[2][1];
        inv.0[0][1] = a[0][2] * a[2][1] - a[0][1] * a[2][2];
        inv.0[0][2] = a[0][1] * a[1][2] - a[0][2] * a[1][1];
        inv.0[1][0] = a[1][2] * a[2][0] - a[1][0] * a[2][2];
        inv.0[1][1] = a[0][0] * a[2][2] - a[0][2] * a[2][0];
        inv.0[1][2] = a[0][2] * a[1][0] - a[0][0] * a[1][2];
        inv.0[2][0] = a[1][0] * a[2][1] - a[1][1] * a[2][0];
        inv.0[2][1] = a[0][1] * a[2][0] - a[0][0] * a[2][1];
        inv.0[2][2] = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        Some(inv * (1.0 / d))
    }

    pub fn dot(&self, other: &Self) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        t
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| self.0[i][k] * v[k]).sum();
        }
        out
    }

    /// Double contraction `A : B = A_ij B_ij`.
    pub fn ddot(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.ddot(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, &x| f64::max(m, math::abs(x)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| math::abs(self.0[i][j] - self.0[j][i]) <= tol))
    }

    pub fn column(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn from_columns(c: [Vec3; 3]) -> Self {
        let mut t = Self::ZERO;
        for j in 0..3 {
            for i in 0..3 {
                t.0[i][j] = c[j][i];
            }
        }
        t
    }

    /// `Q · A · Qᵀ`
    pub fn rotate(&self, q: &Tensor2) -> Self {
        q.dot(self).dot(&q.transpose())
    }

    /// Eigen-decomposition of the symmetric part by cyclic Jacobi sweeps.
    pub fn sym_eigen(&self) -> SymEigen {
        jacobi_eigen(&self.sym())
    }

    /// Applies a scalar function to the spectrum of a symmetric tensor.
    pub fn map_spectral(&self, f: impl Fn(f64) -> f64) -> Self {
        let e = self.sym_eigen();
        e.reassemble(&[f(e.values[0]), f(e.values[1]), f(e.values[2])])
    }
}

impl Index<(usize, usize)> for Tensor2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Tensor2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Tensor2 {
    type Output = Tensor2;
    fn add(mut self, rhs: Tensor2) -> Tensor2 {
        self += rhs;
        self
    }
}

impl AddAssign for Tensor2 {
    fn add_assign(&mut self, rhs: Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Tensor2 {
    type Output = Tensor2;
    fn sub(mut self, rhs: Tensor2) -> Tensor2 {
        self -= rhs;
        self
    }
}

impl SubAssign for Tensor2 {
    fn sub_assign(&mut self, rhs: Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
    }
}

impl Mul<f64> for Tensor2 {
    type Output = Tensor2;
    fn mul(mut self, s: f64) -> Tensor2 {
        for x in self.0.iter_mut().flatten() {
            *x *= s;
        }
        self
    }
}

impl Mul<Tensor2> for Tensor2 {
    type Output = Tensor2;
    fn mul(self, rhs: Tensor2) -> Tensor2 {
        self.dot(&rhs)
    }
}

impl Neg for Tensor2 {
    type Output = Tensor2;
    fn neg(self) -> Tensor2 {
        self * -1.0
    }
}

/// Spectrum of a symmetric tensor: eigenvalues in descending order and the
/// matching unit eigenvectors stored as columns of `vectors`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEigen {
    pub values: [f64; 3],
    pub vectors: Tensor2,
}

impl SymEigen {
    pub fn vector(&self, a: usize) -> Vec3 {
        self.vectors.column(a)
    }

    /// `Σ λₐ nₐ ⊗ nₐ`
    pub fn reassemble(&self, values: &[f64; 3]) -> Tensor2 {
        let mut t = Tensor2::ZERO;
        for (a, &lam) in values.iter().enumerate() {
            let n = self.vector(a);
            t += Tensor2::outer(&n, &n) * lam;
        }
        t
    }
}

fn jacobi_eigen(s: &Tensor2) -> SymEigen {
    let mut a = s.0;
    let mut v = Tensor2::IDENTITY.0;
    let scale = s.max_abs();
    if scale == 0.0 {
        return SymEigen { values: [0.0; 3], vectors: Tensor2::IDENTITY };
    }
    for _sweep in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off <= (1e-17 * scale) * (1e-17 * scale) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
            let t = sgn / (math::abs(theta) + math::sqrt(theta * theta + 1.0));
            let c = 1.0 / math::sqrt(t * t + 1.0);
            let sn = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - sn * akq;
                a[k][q] = sn * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - sn * aqk;
                a[q][k] = sn * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - sn * vkq;
                row[q] = sn * vkp + c * vkq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(core::cmp::Ordering::Equal));
    let values = [a[order[0]][order[0]], a[order[1]][order[1]], a[order[2]][order[2]]];
    let mut vectors = Tensor2::ZERO;
    for (col, &src) in order.iter().enumerate() {
        for row in 0..3 {
            vectors.0[row][col] = v[row][src];
        }
    }
    SymEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let a = Tensor2([[2.0, 0.3, 0.1], [0.0, 1.5, -0.2], [0.4, 0.0, 0.9]]);
        let inv = a.inverse().unwrap();
        let id = a.dot(&inv);
        assert!((id - Tensor2::IDENTITY).max_abs() < 1e-14);
        assert!((a.det() * inv.det() - 1.0).abs() < 1e-14);
        assert!(Tensor2::ZERO.inverse().is_none());
    }

    #[test]
    fn eigen_reconstructs_and_sorts() {
        let s = Tensor2([[4.0, 1.0, -0.5], [1.0, 2.0, 0.3], [-0.5, 0.3, -1.0]]);
        let e = s.sym_eigen();
        assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
        assert!((e.reassemble(&e.values) - s).max_abs() < 1e-13);
        let vtv = e.vectors.transpose().dot(&e.vectors);
        assert!((vtv - Tensor2::IDENTITY).max_abs() < 1e-14);
    }

    #[test]
    fn eigen_of_diagonal_keeps_axes() {
        let e = Tensor2::from_diag([1.0, 3.0, 2.0]).sym_eigen();
        assert_eq!(e.values, [3.0, 2.0, 1.0]);
        assert_eq!(e.vector(0), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn voigt_round_trip() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let t = Tensor2::from_voigt(&v);
        assert_eq!(t[(0, 1)], 4.0);
        assert_eq!(t[(2, 1)], 5.0);
        assert_eq!(t[(2, 0)], 6.0);
        assert_eq!(t.to_voigt(), v);
    }
}
