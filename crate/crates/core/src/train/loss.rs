//! Sobolev stress loss and constraint penalties, with parameter gradients.
//!
//! All terms are evaluated on normalised quantities: stresses are divided by
//! their training range, energies by the energy scale and tangents by the
//! matching product of input ranges.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::energy::{ConjugatePair, EnergySource, ModelBundle, Normalizer, Order};
use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{monoclinic_symmetry_rotation, DeformationGradient, Rotation, Tensor2, Tensor4Full9, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LossWeights {
    /// Stress fit.
    pub w_s: f64,
    /// Constraint energy term.
    pub w_psi: f64,
    /// Constraint stress term.
    pub w_p: f64,
    /// Constraint tangent term.
    pub w_c: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { w_s: 1.0, w_psi: 1.0, w_p: 1.0, w_c: 1.0 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        if [self.w_s, self.w_psi, self.w_p, self.w_c].iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Config("loss weights must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn constraint_active(&self) -> bool {
        self.w_psi > 0.0 || self.w_p > 0.0 || self.w_c > 0.0
    }
}

/// Unweighted parts of the stress loss.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SobolevParts {
    pub energy_ref: f64,
    pub stress_ref: f64,
    pub stress: f64,
}

impl SobolevParts {
    pub fn total(&self, w: &LossWeights) -> f64 {
        self.energy_ref + w.w_s * (self.stress_ref + self.stress)
    }
}

/// Unweighted, already averaged parts of a constraint penalty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParts {
    pub energy: f64,
    pub stress: f64,
    pub tangent: f64,
}

impl PenaltyParts {
    pub fn total(&self, w: &LossWeights) -> f64 {
        w.w_psi * self.energy + w.w_p * self.stress + w.w_c * self.tangent
    }

    pub fn add(&mut self, o: &PenaltyParts) {
        self.energy += o.energy;
        self.stress += o.stress;
        self.tangent += o.tangent;
    }
}

struct Scales {
    d: usize,
    se: f64,
    /// `∂ψ/∂x_a` per unit network gradient.
    f: Vec<f64>,
    dx: Vec<f64>,
    ds: Vec<f64>,
}

impl Scales {
    fn of(model: &ModelBundle) -> Self {
        let d = model.dim();
        let n = &model.normalizer;
        Self {
            d,
            se: n.energy_scale(),
            f: (0..d).map(|a| model.stress_factor(a)).collect(),
            dx: (0..d).map(|a| n.input_range(a)).collect(),
            ds: (0..d).map(|a| n.stress_range(a)).collect(),
        }
    }
}

fn normalized(model: &ModelBundle, xs: &[f64]) -> Vec<f64> {
    let d = model.dim();
    let mut out = Vec::with_capacity(xs.len());
    for row in xs.chunks_exact(d) {
        out.extend(model.normalizer.normalize_input(row));
    }
    out
}

/// Pinned reference terms `(ψ̂₀/s)²` and `Σ (Ŝ₀/ΔS)²`, accumulating the gradient of
/// `energy_ref + w_s · stress_ref` scaled by `scale`.
pub fn reference_terms(model: &ModelBundle, w_s: f64, scale: f64, grad: Option<&mut [f64]>) -> (f64, f64) {
    let sc = Scales::of(model);
    let x0 = normalized(model, &model.pair.input(&DeformationGradient::identity()));
    let tape = model.net.forward(&x0, Order::Gradient);
    let j = tape.output();
    let e = j[0] * j[0];
    let mut s = 0.0;
    let mut adj = vec![0.0; tape.layout().k];
    adj[0] = 2.0 * j[0] * scale;
    for a in 0..sc.d {
        let r = sc.f[a] * j[1 + a] / sc.ds[a];
        s += r * r;
        adj[1 + a] = 2.0 * w_s * scale * r * sc.f[a] / sc.ds[a];
    }
    if let Some(g) = grad {
        model.net.backward(&tape, &adj, g);
    }
    (e, s)
}

/// `scale · Σᵢ ‖(Ŝᵢ − Sᵢ)/ΔS‖²` over physical inputs and targets, accumulating the
/// gradient of `w_s` times that value.
pub fn stress_term(
    model: &ModelBundle,
    inputs: &[f64],
    targets: &[f64],
    w_s: f64,
    scale: f64,
    grad: Option<&mut [f64]>,
) -> f64 {
    let sc = Scales::of(model);
    let d = sc.d;
    let xn = normalized(model, inputs);
    let want_grad = grad.is_some();
    let (jets, tape) = if want_grad {
        let t = model.net.forward(&xn, Order::Gradient);
        (t.output().to_vec(), Some(t))
    } else {
        (model.net.eval(&xn, Order::Gradient), None)
    };
    let k = 1 + d;
    let mut total = 0.0;
    let mut adj = vec![0.0; jets.len()];
    for (i, j) in jets.chunks_exact(k).enumerate() {
        for a in 0..d {
            let r = (sc.f[a] * j[1 + a] - targets[i * d + a]) / sc.ds[a];
            total += r * r;
            adj[i * k + 1 + a] = 2.0 * w_s * scale * r * sc.f[a] / sc.ds[a];
        }
    }
    if let (Some(g), Some(t)) = (grad, tape) {
        model.net.backward(&t, &adj, g);
    }
    scale * total
}

/// Full stress loss over a batch and its unweighted parts.
pub fn loss_sobolev(model: &ModelBundle, inputs: &[f64], targets: &[f64], w: &LossWeights) -> Result<SobolevParts> {
    let d = model.dim();
    if inputs.len() % d != 0 || inputs.len() != targets.len() {
        return Err(Error::Shape { expected: d, got: inputs.len() % d });
    }
    let n = inputs.len() / d;
    let (energy_ref, stress_ref) = reference_terms(model, w.w_s, 1.0, None);
    let stress = if n == 0 { 0.0 } else { stress_term(model, inputs, targets, w.w_s, 1.0 / n as f64, None) };
    Ok(SobolevParts { energy_ref, stress_ref, stress })
}

fn expect_pair(model: &ModelBundle, pair: ConjugatePair) -> Result<()> {
    if model.pair != pair {
        return Err(Error::Variant { expected: pair.name(), got: model.pair.name() });
    }
    Ok(())
}

/// Stress loss of an S–E model.
pub fn loss_sobolev_se(model: &ModelBundle, inputs: &[f64], targets: &[f64], w: &LossWeights) -> Result<f64> {
    expect_pair(model, ConjugatePair::SE)?;
    Ok(loss_sobolev(model, inputs, targets, w)?.total(w))
}

/// Stress loss of a P–F model.
pub fn loss_sobolev_pf(model: &ModelBundle, inputs: &[f64], targets: &[f64], w: &LossWeights) -> Result<f64> {
    expect_pair(model, ConjugatePair::PF)?;
    Ok(loss_sobolev(model, inputs, targets, w)?.total(w))
}

/// Where a rotation acts on `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `Q F`: objectivity.
    Spatial,
    /// `F Q`: material symmetry.
    Referential,
}

/// One anchor deformation and the rotations applied to it.
pub struct Orbit {
    pub f: DeformationGradient,
    pub rotations: Vec<Rotation>,
}

fn mul_t(q: &Tensor2, p: &Tensor2, side: Side) -> Tensor2 {
    match side {
        Side::Spatial => q.dot(p),
        Side::Referential => p.dot(q),
    }
}

fn rotate4(q: &Tensor2, a: &Tensor4Full9, side: Side) -> Tensor4Full9 {
    match side {
        Side::Spatial => a.rotate_spatial(q),
        Side::Referential => a.rotate_referential(q),
    }
}

/// Averaged penalty over orbits: each (anchor, rotation) pair contributes with weight `scale`.
/// Accumulates the gradient of the weighted total when `grad` is given.
pub fn orbit_penalty(
    model: &ModelBundle,
    orbits: &[Orbit],
    side: Side,
    w: &LossWeights,
    square_energy: bool,
    scale: f64,
    with_tangent: bool,
    grad: Option<&mut [f64]>,
) -> PenaltyParts {
    let sc = Scales::of(model);
    let d = sc.d;
    debug_assert_eq!(d, 9);
    let order = if with_tangent || (grad.is_some() && w.w_c > 0.0) { Order::Hessian } else { Order::Gradient };
    // anchors first, then every rotated point in orbit order
    let mut xs = Vec::new();
    for o in orbits {
        xs.extend(o.f.tensor().to_array());
    }
    for o in orbits {
        for q in &o.rotations {
            xs.extend(mul_t(q.tensor(), o.f.tensor(), side).to_array());
        }
    }
    let xn = normalized(model, &xs);
    let want_grad = grad.is_some();
    let (jets, tape) = if want_grad {
        let t = model.net.forward(&xn, order);
        (t.output().to_vec(), Some(t))
    } else {
        (model.net.eval(&xn, order), None)
    };
    let layout = crate::energy::JetLayout::new(d, order);
    let k = layout.k;
    let stress_of = |j: &[f64]| {
        let mut p = [0.0; 9];
        for a in 0..9 {
            p[a] = sc.f[a] * j[1 + a];
        }
        Tensor2::from_slice(&p)
    };
    let tangent_of = |j: &[f64]| {
        let mut m = [[0.0; 9]; 9];
        for a in 0..9 {
            for b in 0..9 {
                m[a][b] = sc.f[a] * sc.f[b] / sc.se * j[layout.hess_slot(a, b)];
            }
        }
        Tensor4Full9(m)
    };
    let mut adj = vec![0.0; jets.len()];
    let mut parts = PenaltyParts::default();
    let n_anchor = orbits.len();
    let mut idx = n_anchor;
    for (i, o) in orbits.iter().enumerate() {
        let ja = &jets[i * k..(i + 1) * k];
        let pa = stress_of(ja);
        let aa = if order == Order::Hessian { Some(tangent_of(ja)) } else { None };
        for q in &o.rotations {
            let q = q.tensor();
            let jr = &jets[idx * k..(idx + 1) * k];
            // energy
            let de = jr[0] - ja[0];
            let (ev, dv) = if square_energy { (de * de, 2.0 * de) } else { (math::abs(de), math::sign(de)) };
            parts.energy += scale * ev;
            let ge = w.w_psi * scale * dv;
            adj[idx * k] += ge;
            adj[i * k] -= ge;
            // stress
            let pr = stress_of(jr);
            let res = pr - mul_t(q, &pa, side);
            let mut lam = Tensor2::ZERO;
            for a in 0..9 {
                let (r, c) = (a / 3, a % 3);
                let rho = res.0[r][c] / sc.ds[a];
                parts.stress += scale * rho * rho;
                lam.0[r][c] = 2.0 * w.w_p * scale * rho / sc.ds[a];
            }
            let qt = q.transpose();
            let mu = match side {
                Side::Spatial => -(qt.dot(&lam)),
                Side::Referential => -(lam.dot(&qt)),
            };
            for a in 0..9 {
                adj[idx * k + 1 + a] += lam.0[a / 3][a % 3] * sc.f[a];
                adj[i * k + 1 + a] += mu.0[a / 3][a % 3] * sc.f[a];
            }
            // tangent
            if let Some(aa) = &aa {
                let ar = tangent_of(jr);
                let expected = rotate4(q, aa, side);
                let mut big = [[0.0; 9]; 9];
                for a in 0..9 {
                    for b in 0..9 {
                        let s = sc.dx[a] * sc.dx[b] / sc.se;
                        let tau = (ar.0[a][b] - expected.0[a][b]) * s;
                        parts.tangent += scale * tau * tau;
                        big[a][b] = 2.0 * w.w_c * scale * tau * s;
                    }
                }
                let big = Tensor4Full9(big);
                let back = rotate4(&qt, &big, side);
                for a in 0..9 {
                    for b in 0..9 {
                        let c = sc.f[a] * sc.f[b] / sc.se;
                        let slot = layout.hess_slot(a, b);
                        adj[idx * k + slot] += big.0[a][b] * c;
                        adj[i * k + slot] -= back.0[a][b] * c;
                    }
                }
            }
            idx += 1;
        }
    }
    if let (Some(g), Some(t)) = (grad, tape) {
        model.net.backward(&t, &adj, g);
    }
    parts
}

/// Objectivity penalty averaged over the batch and the `M` rotations.
pub fn loss_frame_invariance(
    model: &ModelBundle,
    batch: &[DeformationGradient],
    rotations: &[Rotation],
    w: &LossWeights,
) -> Result<PenaltyParts> {
    expect_pair(model, ConjugatePair::PF)?;
    if rotations.is_empty() {
        return Err(Error::Config("frame-invariance penalty needs at least one rotation".into()));
    }
    if batch.is_empty() {
        return Ok(PenaltyParts::default());
    }
    let orbits: Vec<Orbit> = batch.iter().map(|f| Orbit { f: *f, rotations: rotations.to_vec() }).collect();
    let scale = 1.0 / (batch.len() * rotations.len()) as f64;
    Ok(orbit_penalty(model, &orbits, Side::Spatial, w, false, scale, true, None))
}

/// Monoclinic symmetry orbits: the half-turn about `F·M₂` for each `F`.
pub fn symmetry_orbits(batch: &[DeformationGradient], m2: &Vec3) -> Result<Vec<Orbit>> {
    batch
        .iter()
        .map(|f| Ok(Orbit { f: *f, rotations: vec![monoclinic_symmetry_rotation(f, m2, 1)?] }))
        .collect()
}

/// Material-symmetry penalty, summed over group elements and averaged over the batch.
pub fn loss_symmetry(
    model: &ModelBundle,
    batch: &[DeformationGradient],
    m2: &Vec3,
    w: &LossWeights,
) -> Result<PenaltyParts> {
    expect_pair(model, ConjugatePair::PF)?;
    if batch.is_empty() {
        return Ok(PenaltyParts::default());
    }
    let orbits = symmetry_orbits(batch, m2)?;
    Ok(orbit_penalty(model, &orbits, Side::Referential, w, false, 1.0 / batch.len() as f64, true, None))
}

/// Penalty parts with explicit orbits, for callers that build their own rotation sets.
pub fn loss_orbits(model: &ModelBundle, orbits: &[Orbit], side: Side, w: &LossWeights) -> Result<PenaltyParts> {
    expect_pair(model, ConjugatePair::PF)?;
    let n: usize = orbits.iter().map(|o| o.rotations.len()).sum();
    if n == 0 {
        return Ok(PenaltyParts::default());
    }
    let scale = match side {
        Side::Spatial => 1.0 / n as f64,
        Side::Referential => 1.0 / orbits.len() as f64,
    };
    Ok(orbit_penalty(model, orbits, side, w, false, scale, true, None))
}

/// The same penalty for a closed-form energy, in the units fixed by `normalizer`.
pub fn source_penalty<S: EnergySource + ?Sized>(
    src: &S,
    normalizer: &Normalizer,
    orbits: &[Orbit],
    side: Side,
    square_energy: bool,
) -> PenaltyParts {
    let se = normalizer.energy_scale();
    let n: usize = orbits.iter().map(|o| o.rotations.len()).sum();
    if n == 0 {
        return PenaltyParts::default();
    }
    let scale = match side {
        Side::Spatial => 1.0 / n as f64,
        Side::Referential => 1.0 / orbits.len() as f64,
    };
    let mut parts = PenaltyParts::default();
    for o in orbits {
        let (ea, pa, aa) = (src.energy(&o.f), src.first_piola(&o.f), src.tangent_pf(&o.f));
        for q in &o.rotations {
            let fr = match DeformationGradient::new(mul_t(q.tensor(), o.f.tensor(), side)) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let de = (src.energy(&fr) - ea) / se;
            parts.energy += scale * if square_energy { de * de } else { math::abs(de) };
            let res = src.first_piola(&fr) - mul_t(q.tensor(), &pa, side);
            let ar = src.tangent_pf(&fr);
            let expected = rotate4(q.tensor(), &aa, side);
            for a in 0..9 {
                let rho = res.0[a / 3][a % 3] / normalizer.stress_range(a);
                parts.stress += scale * rho * rho;
                for b in 0..9 {
                    let tau = (ar.0[a][b] - expected.0[a][b]) * normalizer.input_range(a) * normalizer.input_range(b) / se;
                    parts.tangent += scale * tau * tau;
                }
            }
        }
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::stiffness::literature_stiffness_b_axis;
    use crate::energy::{Activation, MultiplyKind, NetConfig, StVenantKirchhoff};
    use crate::tensor::{monoclinic_f, CrystalBasis, MonoclinicStretch, Tensor4Voigt6};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small(pair: ConjugatePair, seed: u64) -> ModelBundle {
        let mut m = ModelBundle::init_with(
            seed,
            pair,
            NetConfig { width: 5, activation: Activation::SMOOTH, multiply: MultiplyKind::Square },
        );
        let d = m.dim();
        m.normalizer = Normalizer {
            input_min: (0..d).map(|a| -0.2 + 0.01 * a as f64).collect(),
            input_max: (0..d).map(|a| 1.1 + 0.02 * a as f64).collect(),
            stress_min: (0..d).map(|a| -3.0 - 0.1 * a as f64).collect(),
            stress_max: (0..d).map(|a| 2.0 + 0.3 * a as f64).collect(),
        };
        m
    }

    fn random_f(rng: &mut ChaCha8Rng) -> DeformationGradient {
        let mut t = Tensor2::IDENTITY;
        for r in 0..3 {
            for c in 0..3 {
                t.0[r][c] += rng.random_range(-0.1..0.1);
            }
        }
        DeformationGradient::new(t).unwrap()
    }

    fn batch(pair: ConjugatePair, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = pair.input_dim();
        let mut xs = Vec::new();
        let mut ss = Vec::new();
        for _ in 0..n {
            xs.extend(pair.input(&random_f(&mut rng)));
            ss.extend((0..d).map(|_| rng.random_range(-1.0..1.0)));
        }
        (xs, ss)
    }

    fn fd_check(model: &ModelBundle, f: impl Fn(&ModelBundle) -> f64, grad: &[f64]) {
        let p0 = model.net.params();
        let h = 1e-6;
        let mut m = model.clone();
        for i in (0..p0.len()).step_by(3) {
            let mut p = p0.clone();
            p[i] += h;
            m.net.set_params(&p);
            let up = f(&m);
            p[i] -= 2.0 * h;
            m.net.set_params(&p);
            let dn = f(&m);
            let fd = (up - dn) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-5 * (1.0 + fd.abs()), "param {i}: fd {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn stress_loss_gradient_matches_fd() {
        for pair in [ConjugatePair::SE, ConjugatePair::PF] {
            let m = small(pair, 3);
            let (xs, ss) = batch(pair, 4, 9);
            let w = LossWeights { w_s: 0.7, ..LossWeights::default() };
            let mut g = vec![0.0; m.net.n_params()];
            reference_terms(&m, w.w_s, 1.0, Some(&mut g));
            stress_term(&m, &xs, &ss, w.w_s, 0.25, Some(&mut g));
            fd_check(&m, |m| loss_sobolev(m, &xs, &ss, &w).unwrap().total(&w), &g);
        }
    }

    #[test]
    fn penalty_gradient_matches_fd() {
        let m = small(ConjugatePair::PF, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let orbits: Vec<Orbit> = (0..2)
            .map(|_| Orbit { f: random_f(&mut rng), rotations: (0..2).map(|_| Rotation::random(&mut rng)).collect() })
            .collect();
        let w = LossWeights { w_s: 1.0, w_psi: 0.6, w_p: 1.3, w_c: 0.8 };
        for side in [Side::Spatial, Side::Referential] {
            let mut g = vec![0.0; m.net.n_params()];
            orbit_penalty(&m, &orbits, side, &w, true, 0.25, true, Some(&mut g));
            fd_check(&m, |m| orbit_penalty(m, &orbits, side, &w, true, 0.25, true, None).total(&w), &g);
        }
    }

    #[test]
    fn exact_targets_give_zero_stress_term() {
        let m = small(ConjugatePair::SE, 1);
        let (xs, _) = batch(ConjugatePair::SE, 5, 1);
        let targets: Vec<f64> =
            m.evaluate_batch(&xs, Order::Gradient).unwrap().into_iter().flat_map(|j| j.stress).collect();
        let parts = loss_sobolev(&m, &xs, &targets, &LossWeights::default()).unwrap();
        assert!(parts.stress < 1e-28);
    }

    #[test]
    fn zero_stress_weight_leaves_energy_term() {
        let m = small(ConjugatePair::PF, 2);
        let (xs, ss) = batch(ConjugatePair::PF, 3, 2);
        let w = LossWeights { w_s: 0.0, ..LossWeights::default() };
        let parts = loss_sobolev(&m, &xs, &ss, &w).unwrap();
        assert!(parts.stress > 0.0);
        assert_eq!(parts.total(&w), parts.energy_ref);
    }

    #[test]
    fn two_sample_loss_by_hand() {
        let m = small(ConjugatePair::SE, 6);
        let (xs, ss) = batch(ConjugatePair::SE, 2, 6);
        let n = &m.normalizer;
        let ref_in = ConjugatePair::SE.input(&DeformationGradient::identity());
        let psi0 = m.energy(&ref_in).unwrap() / n.energy_scale();
        let s0 = m.stress(&ref_in).unwrap().to_voigt();
        let mut expected = psi0 * psi0;
        for a in 0..6 {
            expected += (s0[a] / n.stress_range(a)).powi(2);
        }
        for i in 0..2 {
            let s = m.stress(&xs[i * 6..(i + 1) * 6]).unwrap().to_voigt();
            for a in 0..6 {
                expected += 0.5 * ((s[a] - ss[i * 6 + a]) / n.stress_range(a)).powi(2);
            }
        }
        let got = loss_sobolev_se(&m, &xs, &ss, &LossWeights::default()).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected.max(1.0), "{got} vs {expected}");
        assert!(matches!(loss_sobolev_pf(&m, &xs, &ss, &LossWeights::default()), Err(Error::Variant { .. })));
    }

    #[test]
    fn model_penalty_agrees_with_source_penalty() {
        let m = small(ConjugatePair::PF, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fs: Vec<DeformationGradient> = (0..3).map(|_| random_f(&mut rng)).collect();
        let rots: Vec<Rotation> = (0..2).map(|_| Rotation::random(&mut rng)).collect();
        let a = loss_frame_invariance(&m, &fs, &rots, &LossWeights::default()).unwrap();
        let orbits: Vec<Orbit> = fs.iter().map(|f| Orbit { f: *f, rotations: rots.clone() }).collect();
        let b = source_penalty(&m, &m.normalizer, &orbits, Side::Spatial, false);
        for (x, y) in [(a.energy, b.energy), (a.stress, b.stress), (a.tangent, b.tangent)] {
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
        }
        assert!(a.energy > 0.0 && a.stress > 0.0 && a.tangent > 0.0);
    }

    #[test]
    fn svk_oracles_vanish() {
        let svk = StVenantKirchhoff::new(literature_stiffness_b_axis());
        let norm = Normalizer::identity(9);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let orbits: Vec<Orbit> = (0..8)
            .map(|_| Orbit { f: random_f(&mut rng), rotations: (0..4).map(|_| Rotation::random(&mut rng)).collect() })
            .collect();
        let p = source_penalty(&svk, &norm, &orbits, Side::Spatial, false);
        assert!(p.energy < 1e-9 && p.stress < 1e-9 && p.tangent < 1e-9, "{p:?}");

        let basis = CrystalBasis::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let m2 = basis.unique_axis();
        let fs: Vec<DeformationGradient> = (0..8)
            .map(|_| {
                let a = [
                    rng.random_range(0.85..1.15),
                    rng.random_range(0.85..1.15),
                    rng.random_range(0.85..1.15),
                    rng.random_range(-0.15..0.15),
                ];
                monoclinic_f(&MonoclinicStretch { a }, &Rotation::identity(), &basis).unwrap()
            })
            .collect();
        let orbits = symmetry_orbits(&fs, &m2).unwrap();
        let p = source_penalty(&svk, &norm, &orbits, Side::Referential, false);
        assert!(p.energy < 1e-9 && p.stress < 1e-9 && p.tangent < 1e-9, "{p:?}");

        // a coupling forbidden by the two-fold axis breaks the symmetry; on these
        // stretches the strain itself is invariant, so only stress and tangent see it
        let mut c = literature_stiffness_b_axis();
        c.0[0][4] += 2.0;
        c.0[4][0] += 2.0;
        let broken = StVenantKirchhoff::new(Tensor4Voigt6(c.0));
        let p = source_penalty(&broken, &norm, &orbits, Side::Referential, false);
        assert!(p.energy < 1e-12 && p.stress > 1e-4 && p.tangent > 1e-4, "{p:?}");
    }
}
