//! Common interface over learned and closed-form energies, evaluated at `F`.

use serde::{Deserialize, Serialize};

use super::model::{ConjugatePair, ModelBundle, Tangent};
use crate::math;
use crate::tensor::{
    first_elasticity_from_second, green_strain, second_elasticity_from_first, DeformationGradient, Tensor2,
    Tensor4Full9, Tensor4Voigt6,
};

/// A stored-energy functional `ψ(F)` with stress and tangents.
pub trait EnergySource: Sync {
    fn energy(&self, f: &DeformationGradient) -> f64;

    fn first_piola(&self, f: &DeformationGradient) -> Tensor2;

    fn second_piola(&self, f: &DeformationGradient) -> Tensor2 {
        f.inverse().dot(&self.first_piola(f)).sym()
    }

    /// `A_iJkL = ∂²ψ/∂F_iJ∂F_kL`.
    fn tangent_pf(&self, f: &DeformationGradient) -> Tensor4Full9;

    /// `C_IJKL = ∂²ψ/∂E_IJ∂E_KL`.
    fn tangent_se(&self, f: &DeformationGradient) -> Tensor4Voigt6 {
        second_elasticity_from_first(&self.tangent_pf(f), &self.second_piola(f), f)
    }
}

impl<T: EnergySource + ?Sized> EnergySource for &T {
    fn energy(&self, f: &DeformationGradient) -> f64 {
        (**self).energy(f)
    }
    fn first_piola(&self, f: &DeformationGradient) -> Tensor2 {
        (**self).first_piola(f)
    }
    fn second_piola(&self, f: &DeformationGradient) -> Tensor2 {
        (**self).second_piola(f)
    }
    fn tangent_pf(&self, f: &DeformationGradient) -> Tensor4Full9 {
        (**self).tangent_pf(f)
    }
    fn tangent_se(&self, f: &DeformationGradient) -> Tensor4Voigt6 {
        (**self).tangent_se(f)
    }
}

/// Saint Venant–Kirchhoff: `ψ = ½ E : C : E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StVenantKirchhoff {
    pub stiffness: Tensor4Voigt6,
}

impl StVenantKirchhoff {
    pub fn new(stiffness: Tensor4Voigt6) -> Self {
        Self { stiffness }
    }
}

impl EnergySource for StVenantKirchhoff {
    fn energy(&self, f: &DeformationGradient) -> f64 {
        let e = green_strain(f);
        0.5 * e.ddot(&self.stiffness.ddot(&e))
    }

    fn first_piola(&self, f: &DeformationGradient) -> Tensor2 {
        f.tensor().dot(&self.second_piola(f))
    }

    fn second_piola(&self, f: &DeformationGradient) -> Tensor2 {
        self.stiffness.ddot(&green_strain(f))
    }

    fn tangent_pf(&self, f: &DeformationGradient) -> Tensor4Full9 {
        first_elasticity_from_second(&self.stiffness, &self.second_piola(f), f)
    }

    fn tangent_se(&self, _f: &DeformationGradient) -> Tensor4Voigt6 {
        self.stiffness
    }
}

/// Compressible neo-Hookean: `ψ = ½μ(tr C − 3) − μ ln J + ½λ (ln J)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeoHookean {
    pub lambda: f64,
    pub mu: f64,
}

impl EnergySource for NeoHookean {
    fn energy(&self, f: &DeformationGradient) -> f64 {
        let lnj = math::ln(f.jacobian());
        0.5 * self.mu * (f.right_cauchy_green().trace() - 3.0) - self.mu * lnj + 0.5 * self.lambda * lnj * lnj
    }

    fn first_piola(&self, f: &DeformationGradient) -> Tensor2 {
        let lnj = math::ln(f.jacobian());
        let fit = f.inverse().transpose();
        *f.tensor() * self.mu + fit * (self.lambda * lnj - self.mu)
    }

    fn tangent_pf(&self, f: &DeformationGradient) -> Tensor4Full9 {
        let lnj = math::ln(f.jacobian());
        let fi = f.inverse().0;
        let mut m = [[0.0; 9]; 9];
        for i in 0..3 {
            for jj in 0..3 {
                for k in 0..3 {
                    for ll in 0..3 {
                        let id = if i == k && jj == ll { self.mu } else { 0.0 };
                        m[3 * i + jj][3 * k + ll] =
                            id + (self.mu - self.lambda * lnj) * fi[jj][k] * fi[ll][i] + self.lambda * fi[jj][i] * fi[ll][k];
                    }
                }
            }
        }
        Tensor4Full9(m)
    }
}

/// `ψ = ½ (F − I) : K : (F − I)` for a symmetric 9×9 `K`; not objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticInF {
    pub k: Tensor4Full9,
}

impl QuadraticInF {
    fn displacement(f: &DeformationGradient) -> [f64; 9] {
        (*f.tensor() - Tensor2::IDENTITY).to_array()
    }
}

impl EnergySource for QuadraticInF {
    fn energy(&self, f: &DeformationGradient) -> f64 {
        let u = Self::displacement(f);
        let mut s = 0.0;
        for a in 0..9 {
            for b in 0..9 {
                s += u[a] * self.k.0[a][b] * u[b];
            }
        }
        0.5 * s
    }

    fn first_piola(&self, f: &DeformationGradient) -> Tensor2 {
        let u = Self::displacement(f);
        let mut p = [0.0; 9];
        for a in 0..9 {
            p[a] = (0..9).map(|b| self.k.0[a][b] * u[b]).sum();
        }
        Tensor2::from_slice(&p)
    }

    fn second_piola(&self, f: &DeformationGradient) -> Tensor2 {
        f.inverse().dot(&self.first_piola(f))
    }

    fn tangent_pf(&self, _f: &DeformationGradient) -> Tensor4Full9 {
        self.k
    }
}

impl EnergySource for ModelBundle {
    fn energy(&self, f: &DeformationGradient) -> f64 {
        ModelBundle::energy(self, &self.pair.input(f)).unwrap_or(f64::NAN)
    }

    fn first_piola(&self, f: &DeformationGradient) -> Tensor2 {
        let s = self.stress(&self.pair.input(f)).unwrap_or(Tensor2::ZERO);
        match self.pair {
            ConjugatePair::SE => f.tensor().dot(&s),
            ConjugatePair::PF => s,
        }
    }

    fn second_piola(&self, f: &DeformationGradient) -> Tensor2 {
        let s = self.stress(&self.pair.input(f)).unwrap_or(Tensor2::ZERO);
        match self.pair {
            ConjugatePair::SE => s,
            ConjugatePair::PF => f.inverse().dot(&s).sym(),
        }
    }

    fn tangent_pf(&self, f: &DeformationGradient) -> Tensor4Full9 {
        match self.tangent(&self.pair.input(f)) {
            Ok(Tangent::PF(a)) => a,
            Ok(Tangent::SE(c)) => first_elasticity_from_second(&c, &self.second_piola(f), f),
            Err(_) => Tensor4Full9::ZERO,
        }
    }

    fn tangent_se(&self, f: &DeformationGradient) -> Tensor4Voigt6 {
        match self.tangent(&self.pair.input(f)) {
            Ok(Tangent::SE(c)) => c,
            Ok(Tangent::PF(a)) => second_elasticity_from_first(&a, &self.second_piola(f), f),
            Err(_) => Tensor4Voigt6::ZERO,
        }
    }
}
