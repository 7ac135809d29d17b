//! Tangents of the three conjugate pairs and the monoclinic coefficient tables.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::data::stiffness::{to_table, TABLE_VOIGT};
use crate::energy::EnergySource;
use crate::error::{Error, Result};
use crate::tensor::{
    dc_deps_series, log_strain, DeformationGradient, Tensor2, Tensor4, Tensor4Full9, Tensor4Voigt6, DC_DEPS_TERMS,
    VOIGT_PAIRS,
};

/// First elasticity tensor `A_iJkL = ∂P_iJ/∂F_kL`.
pub fn tangent_pf<S: EnergySource + ?Sized>(src: &S, f: &DeformationGradient) -> Tensor4Full9 {
    src.tangent_pf(f)
}

/// `∂σ/∂ε` with `ε = ½ ln C`, taking `∂σ/∂S` at fixed `F`.
pub fn tangent_sigma_eps<S: EnergySource + ?Sized>(src: &S, f: &DeformationGradient) -> Result<Tensor4Voigt6> {
    let c_se = src.tangent_se(f).to_tensor4();
    let eps = log_strain(&f.right_cauchy_green())?;
    let dc = dc_deps_series(&eps, DC_DEPS_TERMS)?;
    Ok(sigma_eps_from_parts(&c_se, &dc, f))
}

fn sigma_eps_from_parts(c_se: &Tensor4, dc: &Tensor4, f: &DeformationGradient) -> Tensor4Voigt6 {
    // dE/dε = ½ dC/dε
    let h = c_se.compose(&dc.scale(0.5));
    let ft = &f.tensor().0;
    let inv_j = 1.0 / f.jacobian();
    let mut t = Tensor4::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            let mut row = [[0.0; 3]; 3];
            for ii in 0..3 {
                for jj in 0..3 {
                    let w = inv_j * ft[i][ii] * ft[j][jj];
                    if w == 0.0 {
                        continue;
                    }
                    for (k, r) in row.iter_mut().enumerate() {
                        for (l, v) in r.iter_mut().enumerate() {
                            *v += w * h.0[ii][jj][k][l];
                        }
                    }
                }
            }
            t.0[i][j] = row;
        }
    }
    t.to_voigt6()
}

/// The 13 table coefficients of a first elasticity tensor, read as `A_iJkL` at the Voigt pairs.
pub fn pf_table(a: &Tensor4Full9) -> [f64; 13] {
    let mut out = [0.0; 13];
    for (o, &(p, q)) in out.iter_mut().zip(TABLE_VOIGT.iter()) {
        let (i, j) = VOIGT_PAIRS[p];
        let (k, l) = VOIGT_PAIRS[q];
        *o = a.get(i, j, k, l);
    }
    out
}

/// Hydrostatic state `F = λ I` at a requested pressure `p = −tr σ / 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureState {
    pub target: f64,
    pub pressure: f64,
    pub stretch: f64,
    pub jacobian: f64,
}

impl PressureState {
    pub fn f(&self) -> DeformationGradient {
        DeformationGradient::new(Tensor2::IDENTITY * self.stretch).expect("positive stretch")
    }
}

/// Smallest accepted stretch when scanning for a pressure.
pub const MIN_HYDROSTATIC_STRETCH: f64 = 0.7;

pub fn hydrostatic_pressure<S: EnergySource + ?Sized>(src: &S, stretch: f64) -> Result<f64> {
    let f = DeformationGradient::new(Tensor2::IDENTITY * stretch)?;
    let p = src.first_piola(&f);
    let sigma = p.dot(&f.tensor().transpose()) * (1.0 / f.jacobian());
    Ok(-sigma.trace() / 3.0)
}

/// Scans `F = λ I` from `λ = 1` downwards and bisects on the first bracket.
pub fn locate_pressure<S: EnergySource + ?Sized>(src: &S, target: f64) -> Result<PressureState> {
    let steps = 120;
    let p0 = hydrostatic_pressure(src, 1.0)?;
    let state = |stretch: f64, pressure: f64| PressureState { target, pressure, stretch, jacobian: stretch * stretch * stretch };
    if p0 == target {
        return Ok(state(1.0, p0));
    }
    let mut lo = (1.0, p0);
    let mut reached = p0;
    for s in 1..=steps {
        let lam = 1.0 - (1.0 - MIN_HYDROSTATIC_STRETCH) * s as f64 / steps as f64;
        let p = hydrostatic_pressure(src, lam)?;
        if !p.is_finite() {
            break;
        }
        if (p - target) * (lo.1 - target) <= 0.0 {
            let (mut a, mut b) = (lo, (lam, p));
            for _ in 0..200 {
                let m = 0.5 * (a.0 + b.0);
                let pm = hydrostatic_pressure(src, m)?;
                if (pm - target) * (a.1 - target) <= 0.0 {
                    b = (m, pm);
                } else {
                    a = (m, pm);
                }
                if (a.0 - b.0).abs() < 1e-15 {
                    break;
                }
            }
            let best = if (a.1 - target).abs() <= (b.1 - target).abs() { a } else { b };
            return Ok(state(best.0, best.1));
        }
        reached = if (p - target).abs() < (reached - target).abs() { p } else { reached };
        lo = (lam, p);
    }
    Err(Error::PressureRange { target, reached })
}

/// Coefficient rows for the S–E, P–F and σ–ε tangents at one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentTable {
    pub label: String,
    pub state: PressureState,
    pub se: [f64; 13],
    pub pf: [f64; 13],
    pub sigma_eps: [f64; 13],
}

pub fn tangent_table_at<S: EnergySource + ?Sized>(src: &S, label: &str, state: PressureState) -> Result<TangentTable> {
    let f = state.f();
    Ok(TangentTable {
        label: label.into(),
        se: to_table(&src.tangent_se(&f)),
        pf: pf_table(&tangent_pf(src, &f)),
        sigma_eps: to_table(&tangent_sigma_eps(src, &f)?),
        state,
    })
}

/// Table at the hydrostatic state carrying the requested pressure (GPa).
pub fn tangent_table<S: EnergySource + ?Sized>(src: &S, pressure: f64) -> Result<TangentTable> {
    let state = locate_pressure(src, pressure)?;
    tangent_table_at(src, &alloc::format!("p={pressure}GPa"), state)
}
