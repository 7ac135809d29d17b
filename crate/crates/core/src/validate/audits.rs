//! Convexity, growth and anisotropy audits.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ellipticity::{acoustic, sphere_angles};
use super::search::{hill_climb, HillClimbConfig};
use crate::energy::EnergySource;
use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{DeformationGradient, Tensor2, Tensor4Full9, UnitVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityPair {
    pub f: [f64; 9],
    pub f_prime: [f64; 9],
    /// `ψ(F′) − ψ(F) − P(F):(F′ − F)`; negative values violate convexity.
    pub residual: f64,
    /// `ψ(F′) − ψ(F) − tr(P·(F − F′))`, kept for comparison.
    pub printed_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub pairs: Vec<ConvexityPair>,
    pub violations: usize,
    pub worst: Option<usize>,
    pub tolerance: f64,
}

/// Random `(F, F′)` pairs with entries of `F − I` drawn from `[−bound, bound]`.
pub fn sample_pairs(n: usize, bound: f64, seed: u64) -> Vec<(DeformationGradient, DeformationGradient)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let mut t = Tensor2::IDENTITY;
        t.0.iter_mut().flatten().for_each(|v| *v += rng.random_range(-bound..=bound));
        if let Ok(f) = DeformationGradient::new(t) {
            return f;
        }
    };
    (0..n).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}

pub fn convexity_check<S: EnergySource + ?Sized>(
    src: &S,
    pairs: &[(DeformationGradient, DeformationGradient)],
    tolerance: f64,
) -> ConvexityReport {
    let mut out = Vec::with_capacity(pairs.len());
    let mut violations = 0;
    let mut worst: Option<(usize, f64)> = None;
    for (k, (f, g)) in pairs.iter().enumerate() {
        let p = src.first_piola(f);
        let dpsi = src.energy(g) - src.energy(f);
        let df = *g.tensor() - *f.tensor();
        let residual = dpsi - p.ddot(&df);
        let printed_residual = dpsi - p.dot(&(*f.tensor() - *g.tensor())).trace();
        if residual < -tolerance {
            violations += 1;
        }
        if worst.is_none_or(|(_, w)| residual < w) {
            worst = Some((k, residual));
        }
        out.push(ConvexityPair { f: f.tensor().to_array(), f_prime: g.tensor().to_array(), residual, printed_residual });
    }
    let worst = worst.filter(|(_, w)| *w < -tolerance).map(|(k, _)| k);
    ConvexityReport { pairs: out, violations, worst, tolerance }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub jacobian: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub points: Vec<GrowthPoint>,
    /// Energy increases at every step as `J` decreases.
    pub monotone: bool,
    pub divergent: bool,
    pub first_decade_slope: f64,
    pub last_decade_slope: f64,
    pub threshold: f64,
    pub min_training_jacobian: Option<f64>,
    /// `J` at which evaluation failed, if it did.
    pub failed_at: Option<f64>,
}

impl GrowthReport {
    pub fn verdict(&self) -> &'static str {
        match (self.failed_at.is_some(), self.divergent, self.monotone) {
            (true, _, _) => "evaluation failed",
            (false, true, _) => "divergent: passes",
            (false, false, true) => "monotone, bounded: fails divergence",
            (false, false, false) => "non-monotone, bounded: fails divergence",
        }
    }
}

/// Default growth threshold on the slope ratio.
pub const GROWTH_THRESHOLD: f64 = 0.5;

/// Log-spaced `J` from 1 down to `j_min`.
pub fn growth_sequence(n: usize, j_min: f64) -> Vec<f64> {
    let n = n.max(2);
    let l = math::ln(j_min);
    (0..n).map(|i| math::exp(l * i as f64 / (n - 1) as f64)).collect()
}

fn slope(points: &[GrowthPoint], hi: f64, lo: f64) -> f64 {
    let at = |target: f64| {
        // energy interpolated in ln J
        let t = math::ln(target);
        for w in points.windows(2) {
            let (a, b) = (math::ln(w[0].jacobian), math::ln(w[1].jacobian));
            if t <= a && t >= b {
                let s = if a == b { 0.0 } else { (t - a) / (b - a) };
                return w[0].energy + s * (w[1].energy - w[0].energy);
            }
        }
        f64::NAN
    };
    (at(lo) - at(hi)) / (math::ln(hi) - math::ln(lo))
}

/// Energy along `F = J^{1/3} I`; divergent iff the last-decade slope of ψ over
/// `−ln J` exceeds `threshold` times the first-decade slope.
pub fn growth_test<S: EnergySource + ?Sized>(
    src: &S,
    jacobians: &[f64],
    threshold: f64,
    min_training_jacobian: Option<f64>,
) -> Result<GrowthReport> {
    if jacobians.is_empty() || jacobians.iter().any(|j| !(*j > 0.0 && *j <= 1.0)) {
        return Err(Error::Domain("growth sequence must lie in (0, 1]".into()));
    }
    if jacobians.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("growth sequence must decrease strictly".into()));
    }
    let mut points = Vec::new();
    let mut failed_at = None;
    for &j in jacobians {
        let f = DeformationGradient::new(Tensor2::IDENTITY * math::cbrt(j))?;
        let e = src.energy(&f);
        if !e.is_finite() {
            failed_at = Some(j);
            break;
        }
        points.push(GrowthPoint { jacobian: j, energy: e });
    }
    let monotone = points.windows(2).all(|w| w[1].energy > w[0].energy);
    let (mut first, mut last) = (f64::NAN, f64::NAN);
    if let (Some(a), Some(b)) = (points.first(), points.last()) {
        let (j0, j1) = (a.jacobian, b.jacobian);
        if j0 / j1 >= 10.0 * (1.0 - 1e-12) {
            first = slope(&points, j0, j0 / 10.0);
            last = slope(&points, j1 * 10.0, j1);
        }
    }
    let divergent = failed_at.is_none() && first.is_finite() && last.is_finite() && last > threshold * first && last > 0.0;
    Ok(GrowthReport {
        points,
        monotone,
        divergent,
        first_decade_slope: first,
        last_decade_slope: last,
        threshold,
        min_training_jacobian,
        failed_at,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyEntry {
    pub f: [f64; 9],
    /// Smallest acoustic eigenvalue over directions (ρ v₁², GPa at unit density).
    pub v1_sq: f64,
    pub v2_sq: f64,
    /// `v₂² / v₁²`, absent when `v₁² ≤ 0`.
    pub index: Option<f64>,
    pub divergent: bool,
    pub arg_min: [f64; 2],
    pub arg_max: [f64; 2],
}

fn eigen_extremes(c: &Tensor4Full9, phi: f64, theta: f64) -> (f64, f64) {
    let a = acoustic(c, &UnitVector::from_spherical(phi, theta)).sym();
    let e = a.sym_eigen();
    (e.values[2], e.values[0])
}

/// Extreme acoustic eigenvalues over the sphere (grid seed, then hill climbing).
pub fn anisotropy_from_tangent(c: &Tensor4Full9, sphere_points: usize, hc: &HillClimbConfig, seed: u64) -> (f64, f64, [f64; 2], [f64; 2]) {
    let angles = sphere_angles(sphere_points);
    let mut lo = (f64::INFINITY, [0.0; 2]);
    let mut hi = (f64::NEG_INFINITY, [0.0; 2]);
    for &[p, t] in &angles {
        let (mn, mx) = eigen_extremes(c, p, t);
        if mn < lo.0 {
            lo = (mn, [p, t]);
        }
        if mx > hi.0 {
            hi = (mx, [p, t]);
        }
    }
    let rmin = hill_climb(&|x: &[f64]| eigen_extremes(c, x[0], x[1]).0, &lo.1, hc, seed, None);
    let rmax = hill_climb(&|x: &[f64]| -eigen_extremes(c, x[0], x[1]).1, &hi.1, hc, seed ^ 1, None);
    (rmin.value, -rmax.value, [rmin.best[0], rmin.best[1]], [rmax.best[0], rmax.best[1]])
}

pub fn anisotropy_index<S: EnergySource + ?Sized>(
    src: &S,
    f: &DeformationGradient,
    sphere_points: usize,
    hc: &HillClimbConfig,
    seed: u64,
) -> AnisotropyEntry {
    let c = src.tangent_pf(f);
    let (v1, v2, arg_min, arg_max) = anisotropy_from_tangent(&c, sphere_points, hc, seed);
    let divergent = !(v1 > 0.0);
    AnisotropyEntry {
        f: f.tensor().to_array(),
        v1_sq: v1,
        v2_sq: v2,
        index: if divergent { None } else { Some(v2 / v1) },
        divergent,
        arg_min,
        arg_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::stiffness::literature_stiffness;
    use crate::energy::{NeoHookean, QuadraticInF, StVenantKirchhoff};
    use crate::tensor::{first_elasticity_from_second, Tensor4Voigt6};

    fn spd9(seed: u64) -> Tensor4Full9 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = [[0.0; 9]; 9];
        b.iter_mut().flatten().for_each(|v| *v = rng.random_range(-1.0..1.0));
        let mut k = [[0.0; 9]; 9];
        for i in 0..9 {
            for j in 0..9 {
                k[i][j] = (0..9).map(|m| b[i][m] * b[j][m]).sum::<f64>() + if i == j { 0.5 } else { 0.0 };
            }
        }
        Tensor4Full9(k)
    }

    #[test]
    fn convex_quadratic_has_no_violations() {
        let q = QuadraticInF { k: spd9(1) };
        let pairs = sample_pairs(200, 0.15, 3);
        let r = convexity_check(&q, &pairs, 1e-10);
        assert_eq!(r.violations, 0);
        assert!(r.worst.is_none());
        let same: Vec<_> = pairs.iter().map(|p| (p.0, p.0)).collect();
        assert!(convexity_check(&q, &same, 1e-10).pairs.iter().all(|p| p.residual.abs() < 1e-14));
    }

    #[test]
    fn concave_direction_is_detected() {
        let mut k = spd9(2);
        // shift to make one direction strongly concave
        let v = [0.6, 0.0, 0.2, 0.0, -0.5, 0.3, 0.1, 0.0, 0.5];
        for i in 0..9 {
            for j in 0..9 {
                k.0[i][j] -= 40.0 * v[i] * v[j];
            }
        }
        let r = convexity_check(&QuadraticInF { k }, &sample_pairs(200, 0.15, 4), 1e-10);
        assert!(r.violations > 0);
        let w = r.worst.unwrap();
        assert!(r.pairs[w].residual < 0.0);
    }

    #[test]
    fn svk_growth_is_bounded() {
        let c = literature_stiffness();
        let svk = StVenantKirchhoff::new(c);
        let js = growth_sequence(121, 1e-6);
        let r = growth_test(&svk, &js, GROWTH_THRESHOLD, Some(0.7225)).unwrap();
        assert!(r.monotone && !r.divergent, "{} {}", r.first_decade_slope, r.last_decade_slope);
        assert_eq!(r.min_training_jacobian, Some(0.7225));
        // limiting energy ½ E₀:C:E₀ at E₀ = −½ I
        let e0 = Tensor2::IDENTITY * -0.5;
        let limit = 0.5 * e0.ddot(&c.ddot(&e0));
        assert!((r.points.last().unwrap().energy - limit).abs() < 1e-3 * limit);
        assert_eq!(r.points[0].energy, 0.0);
    }

    #[test]
    fn log_barrier_growth_is_divergent() {
        let nh = NeoHookean { lambda: 10.0, mu: 5.0 };
        let r = growth_test(&nh, &growth_sequence(121, 1e-6), GROWTH_THRESHOLD, None).unwrap();
        assert!(r.monotone && r.divergent);
        assert_eq!(r.verdict(), "divergent: passes");
    }

    #[test]
    fn growth_input_errors() {
        let nh = NeoHookean { lambda: 10.0, mu: 5.0 };
        assert!(growth_test(&nh, &[1.0, 1.0], 0.5, None).is_err());
        assert!(growth_test(&nh, &[1.2, 0.5], 0.5, None).is_err());
        let one = growth_test(&nh, &[1.0], 0.5, None).unwrap();
        assert!(one.points[0].energy.abs() < 1e-15);
    }

    #[test]
    fn isotropic_index_and_scale_invariance() {
        let (l, m) = (7.0, 3.0);
        let c = first_elasticity_from_second(&Tensor4Voigt6::isotropic(l, m), &Tensor2::ZERO, &DeformationGradient::identity());
        let hc = HillClimbConfig::default();
        let (v1, v2, _, _) = anisotropy_from_tangent(&c, 200, &hc, 1);
        assert!(((v2 / v1) - (l + 2.0 * m) / m).abs() < 1e-6 * (l + 2.0 * m) / m);

        let t = first_elasticity_from_second(&literature_stiffness(), &Tensor2::ZERO, &DeformationGradient::identity());
        let (a1, a2, _, _) = anisotropy_from_tangent(&t, 1000, &hc, 2);
        for s in [2.0, 3.7] {
            let mut ts = t;
            ts.0.iter_mut().flatten().for_each(|v| *v *= s);
            let (b1, b2, _, _) = anisotropy_from_tangent(&ts, 1000, &hc, 2);
            assert!(((b2 / b1) - (a2 / a1)).abs() < 1e-12 * (a2 / a1));
        }
    }
}
