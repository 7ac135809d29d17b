//! Fourth-order tensors: full index form, minor-symmetric Voigt storage and
//! the 9×9 first-elasticity storage.

use serde::{Deserialize, Serialize};

use super::kinematics::{DeformationGradient, Rotation};
use super::second::{voigt_index, Tensor2, VOIGT_PAIRS};
use crate::error::{Error, Result};
use crate::math;

const fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Full-index fourth-order tensor `T_ijkl`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor4(pub [[[[f64; 3]; 3]; 3]; 3]);

impl Tensor4 {
    pub const ZERO: Tensor4 = Tensor4([[[[0.0; 3]; 3]; 3]; 3]);

    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        t.0[i][j][k][l] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[i][j][k][l]
    }

    /// `T : A`, contracting the last two indices.
    pub fn ddot(&self, a: &Tensor2) -> Tensor2 {
        let mut out = Tensor2::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += self.0[i][j][k][l] * a.0[k][l];
                    }
                }
                out.0[i][j] = s;
            }
        }
        out
    }

    /// Double contraction `(A : B)_ijkl = A_ijmn B_mnkl`.
    pub fn compose(&self, other: &Tensor4) -> Tensor4 {
        Tensor4::from_fn(|i, j, k, l| {
            let mut s = 0.0;
            for m in 0..3 {
                for n in 0..3 {
                    s += self.0[i][j][m][n] * other.0[m][n][k][l];
                }
            }
            s
        })
    }

    /// `T'_ijkl = Q_ia Q_jb Q_kc Q_ld T_abcd`.
    pub fn rotate(&self, q: &Tensor2) -> Tensor4 {
        let q = &q.0;
        let mut t1 = Tensor4::ZERO;
        for i in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        t1.0[i][b][c][d] = (0..3).map(|a| q[i][a] * self.0[a][b][c][d]).sum();
                    }
                }
            }
        }
        let mut t2 = Tensor4::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        t2.0[i][j][c][d] = (0..3).map(|b| q[j][b] * t1.0[i][b][c][d]).sum();
                    }
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for d in 0..3 {
                        t1.0[i][j][k][d] = (0..3).map(|c| q[k][c] * t2.0[i][j][c][d]).sum();
                    }
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        t2.0[i][j][k][l] = (0..3).map(|d| q[l][d] * t1.0[i][j][k][d]).sum();
                    }
                }
            }
        }
        t2
    }

    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for a in self.0.iter().flatten().flatten().flatten() {
            s += a * a;
        }
        math::sqrt(s)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().flatten().flatten().fold(0.0, |m, a| m.max(math::abs(*a)))
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        Tensor4::from_fn(|i, j, k, l| self.0[i][j][k][l] - other.0[i][j][k][l])
    }

    pub fn scale(&self, s: f64) -> Tensor4 {
        Tensor4::from_fn(|i, j, k, l| self.0[i][j][k][l] * s)
    }

    /// Voigt storage; minor-symmetric parts are averaged.
    pub fn to_voigt6(&self) -> Tensor4Voigt6 {
        let mut m = [[0.0; 6]; 6];
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            for (b, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
                m[a][b] = 0.25
                    * (self.0[i][j][k][l] + self.0[j][i][k][l] + self.0[i][j][l][k] + self.0[j][i][l][k]);
            }
        }
        Tensor4Voigt6(m)
    }

    pub fn to_full9(&self) -> Tensor4Full9 {
        let mut m = [[0.0; 9]; 9];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m[3 * i + j][3 * k + l] = self.0[i][j][k][l];
                    }
                }
            }
        }
        Tensor4Full9(m)
    }
}

/// Minor-symmetric tangent in Voigt order (11, 22, 33, 12, 23, 13), tensor components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor4Voigt6(pub [[f64; 6]; 6]);

impl Tensor4Voigt6 {
    pub const ZERO: Tensor4Voigt6 = Tensor4Voigt6([[0.0; 6]; 6]);

    /// `C_ijkl` for any index order.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[voigt_index(i, j)][voigt_index(k, l)]
    }

    pub fn to_tensor4(&self) -> Tensor4 {
        Tensor4::from_fn(|i, j, k, l| self.get(i, j, k, l))
    }

    /// Isotropic stiffness `λ δ_ij δ_kl + μ (δ_ik δ_jl + δ_il δ_jk)`.
    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        Tensor4::from_fn(|i, j, k, l| {
            lambda * delta(i, j) * delta(k, l) + mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))
        })
        .to_voigt6()
    }

    pub fn transpose(&self) -> Self {
        let mut m = [[0.0; 6]; 6];
        for (a, row) in m.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.0[b][a];
            }
        }
        Tensor4Voigt6(m)
    }

    /// `S = C : E` for symmetric `E`.
    pub fn ddot(&self, e: &Tensor2) -> Tensor2 {
        self.to_tensor4().ddot(e)
    }

    pub fn rotate(&self, q: &Rotation) -> Self {
        self.to_tensor4().rotate(q.tensor()).to_voigt6()
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.0.iter().flatten().map(|a| a * a).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, a| m.max(math::abs(*a)))
    }

    pub fn asymmetry(&self) -> f64 {
        let mut s = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                let d = self.0[a][b] - self.0[b][a];
                s += d * d;
            }
        }
        math::sqrt(s)
    }

    /// Minimum eigenvalue of the symmetric part of the 6×6 matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = 6;
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 0.5 * (self.0[i][j] + self.0[j][i]);
            }
        }
        crate::tensor::sym_eigenvalues(&mut a, n).into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// First-elasticity tangent `A_iJkL` stored as a 9×9 matrix over pairs `(iJ), (kL)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor4Full9(pub [[f64; 9]; 9]);

impl Tensor4Full9 {
    pub const ZERO: Tensor4Full9 = Tensor4Full9([[0.0; 9]; 9]);

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[3 * i + j][3 * k + l]
    }

    pub fn to_tensor4(&self) -> Tensor4 {
        Tensor4::from_fn(|i, j, k, l| self.get(i, j, k, l))
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.0.iter().flatten().map(|a| a * a).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, a| m.max(math::abs(*a)))
    }

    pub fn asymmetry(&self) -> f64 {
        let mut s = 0.0;
        for a in 0..9 {
            for b in 0..9 {
                let d = self.0[a][b] - self.0[b][a];
                s += d * d;
            }
        }
        math::sqrt(s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = self.0;
        for (row, orow) in m.iter_mut().zip(other.0.iter()) {
            for (v, o) in row.iter_mut().zip(orow.iter()) {
                *v -= o;
            }
        }
        Tensor4Full9(m)
    }

    /// `(Q⋆A)_iJkL = Q_im Q_kn A_mJnL`: rotate both spatial legs.
    pub fn rotate_spatial(&self, q: &Tensor2) -> Self {
        let mut out = [[0.0; 9]; 9];
        for i in 0..3 {
            for jj in 0..3 {
                for k in 0..3 {
                    for ll in 0..3 {
                        let mut s = 0.0;
                        for m in 0..3 {
                            for n in 0..3 {
                                s += q.0[i][m] * q.0[k][n] * self.get(m, jj, n, ll);
                            }
                        }
                        out[3 * i + jj][3 * k + ll] = s;
                    }
                }
            }
        }
        Tensor4Full9(out)
    }

    /// `(A⋆Q)_iJkL = A_iMkN Q_MJ Q_NL`: rotate both referential legs.
    pub fn rotate_referential(&self, q: &Tensor2) -> Self {
        let mut out = [[0.0; 9]; 9];
        for i in 0..3 {
            for jj in 0..3 {
                for k in 0..3 {
                    for ll in 0..3 {
                        let mut s = 0.0;
                        for m in 0..3 {
                            for n in 0..3 {
                                s += self.get(i, m, k, n) * q.0[m][jj] * q.0[n][ll];
                            }
                        }
                        out[3 * i + jj][3 * k + ll] = s;
                    }
                }
            }
        }
        Tensor4Full9(out)
    }
}

/// `A_iJkL = F_iI F_kK C_IJKL + S_JL δ_ik`.
pub fn first_elasticity_from_second(c_se: &Tensor4Voigt6, s: &Tensor2, f: &DeformationGradient) -> Tensor4Full9 {
    let ft = &f.tensor().0;
    let c = c_se.to_tensor4();
    // (F C)_iJKL = F_iI C_IJKL
    let mut fc = Tensor4::ZERO;
    for i in 0..3 {
        for jj in 0..3 {
            for kk in 0..3 {
                for ll in 0..3 {
                    fc.0[i][jj][kk][ll] = (0..3).map(|ii| ft[i][ii] * c.0[ii][jj][kk][ll]).sum();
                }
            }
        }
    }
    let mut out = [[0.0; 9]; 9];
    for i in 0..3 {
        for jj in 0..3 {
            for k in 0..3 {
                for ll in 0..3 {
                    let v: f64 = (0..3).map(|kk| ft[k][kk] * fc.0[i][jj][kk][ll]).sum();
                    out[3 * i + jj][3 * k + ll] = v + s.0[jj][ll] * delta(i, k);
                }
            }
        }
    }
    Tensor4Full9(out)
}

/// Inverse of [`first_elasticity_from_second`]: `C_IJKL = F⁻¹_Ii F⁻¹_Kk (A_iJkL − S_JL δ_ik)`.
pub fn second_elasticity_from_first(a: &Tensor4Full9, s: &Tensor2, f: &DeformationGradient) -> Tensor4Voigt6 {
    let fi = f.inverse().0;
    let g = Tensor4::from_fn(|i, jj, k, ll| a.get(i, jj, k, ll) - s.0[jj][ll] * delta(i, k));
    let mut h = Tensor4::ZERO;
    for ii in 0..3 {
        for jj in 0..3 {
            for k in 0..3 {
                for ll in 0..3 {
                    h.0[ii][jj][k][ll] = (0..3).map(|i| fi[ii][i] * g.0[i][jj][k][ll]).sum();
                }
            }
        }
    }
    Tensor4::from_fn(|ii, jj, kk, ll| (0..3).map(|k| fi[kk][k] * h.0[ii][jj][k][ll]).sum()).to_voigt6()
}

/// Truncated power series for `∂C/∂ε` with `C = exp(2ε)`, symmetrised in `(k, l)`.
///
/// Fails with [`Error::SeriesNotConverged`] when the last retained term is not
/// negligible relative to the sum.
pub fn dc_deps_series(eps: &Tensor2, n_terms: usize) -> Result<Tensor4> {
    if !eps.is_symmetric(1e-12 * eps.max_abs().max(1.0)) {
        return Err(Error::Domain("strain tensor is not symmetric".into()));
    }
    if n_terms == 0 {
        return Err(Error::Domain("series needs at least one term".into()));
    }
    // powers[p] = ε^p
    let mut powers = alloc::vec![Tensor2::IDENTITY];
    for p in 1..n_terms {
        let next = powers[p - 1].dot(eps);
        powers.push(next);
    }
    let mut sum = Tensor4::ZERO;
    let mut coeff = 1.0;
    let mut last = 0.0;
    for n in 1..=n_terms {
        coeff *= 2.0 / n as f64;
        let mut term = Tensor4::ZERO;
        for m in 1..=n {
            let a = &powers[m - 1].0;
            let b = &powers[n - m].0;
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            term.0[i][j][k][l] += 0.5 * (a[i][k] * b[l][j] + a[i][l] * b[k][j]);
                        }
                    }
                }
            }
        }
        let term = term.scale(coeff);
        last = term.norm();
        sum = Tensor4::from_fn(|i, j, k, l| sum.0[i][j][k][l] + term.0[i][j][k][l]);
    }
    let tol = DC_DEPS_TAIL_TOL;
    if n_terms >= 2 && last > tol * sum.norm().max(1.0) {
        return Err(Error::SeriesNotConverged { tail: last, tol });
    }
    Ok(sum)
}

/// Relative tail tolerance used by [`dc_deps_series`].
pub const DC_DEPS_TAIL_TOL: f64 = 1e-10;

pub const DC_DEPS_TERMS: usize = 20;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kinematics::exp_sym;

    fn fd_dc(eps: &Tensor2, h: f64) -> Tensor4 {
        let mut out = Tensor4::ZERO;
        for k in 0..3 {
            for l in 0..3 {
                let mut d = Tensor2::ZERO;
                d.0[k][l] += 0.5 * h;
                d.0[l][k] += 0.5 * h;
                let cp = exp_sym(&((*eps + d) * 2.0));
                let cm = exp_sym(&((*eps - d) * 2.0));
                for i in 0..3 {
                    for j in 0..3 {
                        out.0[i][j][k][l] = (cp.0[i][j] - cm.0[i][j]) / (2.0 * h);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn dc_deps_at_zero() {
        let t = dc_deps_series(&Tensor2::ZERO, DC_DEPS_TERMS).unwrap();
        let want = Tensor4::from_fn(|i, j, k, l| delta(i, k) * delta(l, j) + delta(i, l) * delta(k, j));
        assert!(t.sub(&want).max_abs() < 1e-15);
    }

    #[test]
    fn dc_deps_matches_fd() {
        let eps = Tensor2::from_diag([0.1, 0.0, 0.0]);
        let t = dc_deps_series(&eps, DC_DEPS_TERMS).unwrap();
        assert!(t.sub(&fd_dc(&eps, 1e-5)).max_abs() < 1e-8);

        let mut eps = Tensor2::from_diag([0.05, -0.08, 0.02]);
        eps.0[0][1] = 0.04;
        eps.0[1][0] = 0.04;
        eps.0[1][2] = -0.03;
        eps.0[2][1] = -0.03;
        let t = dc_deps_series(&eps, DC_DEPS_TERMS).unwrap();
        assert!(t.sub(&fd_dc(&eps, 1e-5)).max_abs() < 1e-8);
    }

    #[test]
    fn dc_deps_converges() {
        let mut eps = Tensor2::from_diag([0.1, -0.1, 0.05]);
        eps.0[0][2] = 0.1;
        eps.0[2][0] = 0.1;
        let eps = eps * (0.2 / eps.norm());
        assert!(matches!(dc_deps_series(&eps, 1), Ok(_)));
        let t30 = dc_deps_series(&eps, 30).unwrap();
        let t20 = dc_deps_series(&eps, 20).unwrap();
        assert!(t30.sub(&t20).norm() / t30.norm() < 1e-9);
        let t1 = dc_deps_series(&eps, 1).unwrap();
        assert!(t30.sub(&t1).norm() / t30.norm() > 1e-3);
    }

    #[test]
    fn dc_deps_rejects_nonsymmetric() {
        let mut eps = Tensor2::ZERO;
        eps.0[0][1] = 0.1;
        assert!(dc_deps_series(&eps, 20).is_err());
        let big = Tensor2::from_diag([3.0, 0.0, 0.0]);
        assert!(matches!(dc_deps_series(&big, 5), Err(Error::SeriesNotConverged { .. })));
    }

    #[test]
    fn voigt_round_trip_full() {
        let mut m = [[0.0; 6]; 6];
        for a in 0..6 {
            for b in a..6 {
                let v = (a * 7 + b * 3) as f64 * 0.37 - 2.0;
                m[a][b] = v;
                m[b][a] = v;
            }
        }
        let c = Tensor4Voigt6(m);
        assert_eq!(c.to_tensor4().to_voigt6(), c);
    }

    #[test]
    fn rotation_preserves_isotropic() {
        let c = Tensor4Voigt6::isotropic(2.0, 3.0);
        let q = crate::tensor::kinematics::rotation_exp(&[0.3, -0.7, 1.1]);
        let r = c.rotate(&q);
        for a in 0..6 {
            for b in 0..6 {
                assert!((r.0[a][b] - c.0[a][b]).abs() < 1e-12);
            }
        }
        assert!((c.0[0][0] - 8.0).abs() < 1e-15 && (c.0[3][3] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn first_second_round_trip() {
        let f = DeformationGradient::new(Tensor2([[1.05, 0.1, 0.0], [-0.02, 0.95, 0.03], [0.04, 0.0, 1.1]])).unwrap();
        let c = Tensor4Voigt6::isotropic(1.5, 0.7);
        let s = Tensor2([[0.2, 0.1, 0.0], [0.1, -0.3, 0.05], [0.0, 0.05, 0.1]]);
        let a = first_elasticity_from_second(&c, &s, &f);
        assert!(a.asymmetry() < 1e-12);
        let back = second_elasticity_from_first(&a, &s, &f);
        assert!((0..6).all(|i| (0..6).all(|j| (back.0[i][j] - c.0[i][j]).abs() < 1e-12)));
    }
}
