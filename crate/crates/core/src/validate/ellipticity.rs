//! Acoustic tensor, strong ellipticity criteria and their search over directions and states.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::search::{hill_climb, HillClimbConfig};
use crate::energy::EnergySource;
use crate::math;
use crate::tensor::{monoclinic_f, CrystalBasis, DeformationGradient, MonoclinicStretch, Rotation, Tensor2, Tensor4Full9, UnitVector};

/// `A_ik = N_J C_iJkL N_L`.
pub fn acoustic(c: &Tensor4Full9, n: &UnitVector) -> Tensor2 {
    let n = n.as_array();
    let mut a = Tensor2::ZERO;
    for i in 0..3 {
        for k in 0..3 {
            let mut s = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    s += n[j] * c.get(i, j, k, l) * n[l];
                }
            }
            a.0[i][k] = s;
        }
    }
    a
}

/// `(f, g, d)`: smallest diagonal entry, smallest 2×2 principal minor, determinant.
pub fn ellipticity_criteria(a: &Tensor2) -> [f64; 3] {
    let m = &a.0;
    let f = m[0][0].min(m[1][1]).min(m[2][2]);
    let mut g = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            g = g.min(m[i][i] * m[j][j] - m[i][j] * m[j][i]);
        }
    }
    [f, g, a.det()]
}

pub fn is_elliptic(crit: &[f64; 3]) -> bool {
    crit.iter().all(|v| *v > 0.0)
}

fn grid_shape(n: usize) -> (usize, usize) {
    let mut rows = 1;
    let mut r = 1;
    while r * r <= n {
        if n % r == 0 {
            rows = r;
        }
        r += 1;
    }
    (rows, n / rows)
}

/// Angles `(φ, θ)` of a product grid on `[0, π] × [0, π]` with `n` nodes.
pub fn sphere_angles(n: usize) -> Vec<[f64; 2]> {
    let n = n.max(1);
    let (np, nt) = grid_shape(n);
    let at = |i: usize, m: usize| if m == 1 { 0.0 } else { core::f64::consts::PI * i as f64 / (m - 1) as f64 };
    let mut out = Vec::with_capacity(n);
    for i in 0..np {
        for j in 0..nt {
            out.push([at(i, np), at(j, nt)]);
        }
    }
    out
}

pub fn sphere_grid(n: usize) -> Vec<UnitVector> {
    sphere_angles(n).into_iter().map(|[p, t]| UnitVector::from_spherical(p, t)).collect()
}

/// Default sphere sample size.
pub const SPHERE_POINTS: usize = 1000;

/// Range of deformations searched by the state-dependent criteria.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StateRange {
    Fixed([f64; 9]),
    /// Monoclinic stretches with `a₁..a₃ ∈ [1 − r, 1 + r]`, `a₄ ∈ [−r, r]`, `per_axis` grid nodes each.
    Monoclinic { range: f64, per_axis: usize },
}

impl Default for StateRange {
    fn default() -> Self {
        StateRange::Monoclinic { range: 0.15, per_axis: 5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EllipticityConfig {
    pub sphere_points: usize,
    pub hill_climb: HillClimbConfig,
    /// Candidates kept within this fraction of the grid minimum.
    pub candidate_fraction: f64,
    pub candidate_floor: f64,
    /// Upper bound on hill-climb restarts per criterion.
    pub max_candidates: usize,
    pub seed: u64,
}

impl Default for EllipticityConfig {
    fn default() -> Self {
        Self {
            sphere_points: SPHERE_POINTS,
            hill_climb: HillClimbConfig::default(),
            candidate_fraction: 0.05,
            candidate_floor: 1e-9,
            max_candidates: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub minimum: f64,
    pub arg_angles: [f64; 2],
    pub arg_f: [f64; 9],
    pub grid_minimum: f64,
    pub candidates: usize,
    pub trace_len: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub criteria: Vec<CriterionResult>,
    /// Grid states whose tangent was not finite.
    pub excluded_states: Vec<[f64; 9]>,
    pub pass: bool,
}

const NAMES: [&str; 3] = ["f", "g", "d"];

fn basis_f(a: [f64; 4]) -> Option<DeformationGradient> {
    monoclinic_f(&MonoclinicStretch { a }, &Rotation::identity(), &CrystalBasis::beta_hmx()).ok()
}

fn finite(c: &Tensor4Full9) -> bool {
    c.0.iter().flatten().all(|v| v.is_finite())
}

/// Three-step search: point cloud, hill climbing from the near-minimal
/// candidates, then the sign test on the worst values.
pub fn strong_ellipticity_test<S: EnergySource + ?Sized>(
    src: &S,
    states: &StateRange,
    cfg: &EllipticityConfig,
) -> EllipticityReport {
    let angles = sphere_angles(cfg.sphere_points);
    let dirs: Vec<UnitVector> = angles.iter().map(|&[p, t]| UnitVector::from_spherical(p, t)).collect();
    // state grid: (parameters, F)
    let mut grid: Vec<(Vec<f64>, DeformationGradient)> = Vec::new();
    let (range, n_state) = match *states {
        StateRange::Fixed(f) => {
            if let Ok(f) = DeformationGradient::new(Tensor2::from_slice(&f)) {
                grid.push((Vec::new(), f));
            }
            (0.0, 0)
        }
        StateRange::Monoclinic { range, per_axis } => {
            let m = per_axis.max(1);
            let node = |i: usize, lo: f64, hi: f64| if m == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 };
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            let a = [
                                node(i, 1.0 - range, 1.0 + range),
                                node(j, 1.0 - range, 1.0 + range),
                                node(k, 1.0 - range, 1.0 + range),
                                node(l, -range, range),
                            ];
                            if let Some(f) = basis_f(a) {
                                grid.push((a.to_vec(), f));
                            }
                        }
                    }
                }
            }
            (range, 4)
        }
    };
    let mut excluded = Vec::new();
    let mut values: Vec<(usize, usize, [f64; 3])> = Vec::new();
    let mut tangents = Vec::new();
    for (si, (_, f)) in grid.iter().enumerate() {
        let c = src.tangent_pf(f);
        if !finite(&c) {
            excluded.push(f.tensor().to_array());
            continue;
        }
        for (di, n) in dirs.iter().enumerate() {
            values.push((si, di, ellipticity_criteria(&acoustic(&c, n))));
        }
        tangents.push((si, c));
    }
    let fixed_f = match states {
        StateRange::Fixed(_) => grid.first().map(|g| g.1),
        _ => None,
    };
    let fixed_c = fixed_f.and_then(|_| tangents.first().map(|t| t.1));
    let clamp = move |x: &mut [f64]| {
        for (i, v) in x.iter_mut().enumerate().skip(2) {
            *v = if i < 5 { v.clamp(1.0 - range, 1.0 + range) } else { v.clamp(-range, range) };
        }
    };
    let mut criteria = Vec::new();
    for c in 0..3 {
        let mut sorted: Vec<&(usize, usize, [f64; 3])> = values.iter().filter(|v| v.2[c].is_finite()).collect();
        sorted.sort_by(|a, b| a.2[c].total_cmp(&b.2[c]).then((a.0, a.1).cmp(&(b.0, b.1))));
        let Some(first) = sorted.first() else {
            criteria.push(CriterionResult {
                name: NAMES[c].into(),
                minimum: f64::NAN,
                arg_angles: [0.0; 2],
                arg_f: [0.0; 9],
                grid_minimum: f64::NAN,
                candidates: 0,
                trace_len: 0,
                pass: false,
            });
            continue;
        };
        let gmin = first.2[c];
        let tol = (cfg.candidate_fraction * gmin.abs()).max(cfg.candidate_floor);
        let cands: Vec<_> = sorted.iter().take_while(|v| v.2[c] - gmin <= tol).take(cfg.max_candidates.max(1)).collect();
        let objective = |x: &[f64]| -> f64 {
            let n = UnitVector::from_spherical(x[0], x[1]);
            let t = match (&fixed_c, n_state) {
                (Some(t), _) => *t,
                _ => match basis_f([x[2], x[3], x[4], x[5]]) {
                    Some(f) => src.tangent_pf(&f),
                    None => return f64::INFINITY,
                },
            };
            let v = ellipticity_criteria(&acoustic(&t, &n))[c];
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        let mut best = (gmin, angles[first.1], grid[first.0].1.tensor().to_array());
        let mut trace_len = 0;
        for (ci, cand) in cands.iter().enumerate() {
            let mut x = angles[cand.1].to_vec();
            x.extend_from_slice(&grid[cand.0].0);
            let seed = cfg.seed ^ ((c as u64) << 32) ^ ci as u64;
            let clamp_ref: Option<&dyn Fn(&mut [f64])> = if n_state > 0 { Some(&clamp) } else { None };
            let r = hill_climb(&objective, &x, &cfg.hill_climb, seed, clamp_ref);
            trace_len += r.trace.len();
            if r.value < best.0 {
                let f = if n_state > 0 {
                    basis_f([r.best[2], r.best[3], r.best[4], r.best[5]]).map(|f| f.tensor().to_array()).unwrap_or(best.2)
                } else {
                    best.2
                };
                best = (r.value, [wrap(r.best[0]), wrap(r.best[1])], f);
            }
        }
        criteria.push(CriterionResult {
            name: NAMES[c].into(),
            minimum: best.0,
            arg_angles: best.1,
            arg_f: best.2,
            grid_minimum: gmin,
            candidates: cands.len(),
            trace_len,
            pass: best.0 > 0.0,
        });
    }
    let pass = criteria.iter().all(|c| c.pass);
    EllipticityReport { criteria, excluded_states: excluded, pass }
}

fn wrap(a: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let r = a - two_pi * math::floor(a / two_pi);
    if r.is_finite() {
        r
    } else {
        a
    }
}

/// Smallest `(f, g, d)` over the sphere grid at one tangent.
pub fn grid_minima(c: &Tensor4Full9, dirs: &[UnitVector]) -> [f64; 3] {
    let mut m = [f64::INFINITY; 3];
    for n in dirs {
        let v = ellipticity_criteria(&acoustic(c, n));
        for k in 0..3 {
            m[k] = m[k].min(v[k]);
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub parameter: f64,
    pub minima: [f64; 3],
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    /// First sweep parameter whose grid minima fail.
    pub first_failure: Option<f64>,
    /// Last passing parameter before it.
    pub last_pass: Option<f64>,
}

/// Ellipticity along a one-parameter family of tangents.
pub fn ellipticity_sweep(tangent: &dyn Fn(f64) -> Option<Tensor4Full9>, parameters: &[f64], sphere_points: usize) -> SweepReport {
    let dirs = sphere_grid(sphere_points);
    let mut points = Vec::with_capacity(parameters.len());
    let mut first_failure = None;
    let mut last_pass = None;
    for &p in parameters {
        let minima = match tangent(p) {
            Some(c) if finite(&c) => grid_minima(&c, &dirs),
            _ => [f64::NAN; 3],
        };
        let pass = is_elliptic(&minima);
        if first_failure.is_none() {
            if pass {
                last_pass = Some(p);
            } else {
                first_failure = Some(p);
            }
        }
        points.push(SweepPoint { parameter: p, minima, pass });
    }
    SweepReport { points, first_failure, last_pass }
}

/// Equal biaxial compression of `x₁, x₂` by `level`.
pub fn biaxial_compression(level: f64) -> Option<DeformationGradient> {
    let mut t = Tensor2::IDENTITY;
    t.0[0][0] = 1.0 - level;
    t.0[1][1] = 1.0 - level;
    DeformationGradient::new(t).ok()
}

/// Sweep of the biaxial compression levels for an energy source.
pub fn biaxial_sweep<S: EnergySource + ?Sized>(src: &S, levels: &[f64], sphere_points: usize) -> SweepReport {
    ellipticity_sweep(&|l| biaxial_compression(l).map(|f| src.tangent_pf(&f)), levels, sphere_points)
}

/// Evenly spaced sweep parameters `0, h, …, max`.
pub fn sweep_levels(max: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps).map(|i| max * i as f64 / steps as f64).collect()
}
