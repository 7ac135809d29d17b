//! Normalised network bundle evaluated in physical units.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::net::{Activation, EnergyNet, JetLayout, MultiplyKind, Order};
use crate::error::{Error, Result};
use crate::tensor::{green_strain, DeformationGradient, Tensor2, Tensor4Full9, Tensor4Voigt6};

/// Which energy-conjugate pair the network is trained on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConjugatePair {
    /// Input Green strain (6 components), output second Piola–Kirchhoff stress.
    #[serde(rename = "S-E")]
    SE,
    /// Input deformation gradient (9 components), output first Piola–Kirchhoff stress.
    #[serde(rename = "P-F")]
    PF,
}

impl ConjugatePair {
    pub fn input_dim(self) -> usize {
        match self {
            ConjugatePair::SE => 6,
            ConjugatePair::PF => 9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConjugatePair::SE => "S-E",
            ConjugatePair::PF => "P-F",
        }
    }

    /// Factor between `∂ψ/∂x_a` and the tensor stress component; symmetric
    /// off-diagonal strain components appear twice in `E`.
    pub fn component_factor(self, a: usize) -> f64 {
        match self {
            ConjugatePair::SE if a >= 3 => 0.5,
            _ => 1.0,
        }
    }

    /// Network input for `F`.
    pub fn input(self, f: &DeformationGradient) -> Vec<f64> {
        match self {
            ConjugatePair::SE => green_strain(f).to_voigt().to_vec(),
            ConjugatePair::PF => f.tensor().to_array().to_vec(),
        }
    }

    /// Stress tensor from its input-ordered components.
    pub fn stress_tensor(self, c: &[f64]) -> Tensor2 {
        match self {
            ConjugatePair::SE => Tensor2::from_voigt(c),
            ConjugatePair::PF => Tensor2::from_slice(c),
        }
    }

    /// Input-ordered components of a stress tensor.
    pub fn stress_components(self, s: &Tensor2) -> Vec<f64> {
        match self {
            ConjugatePair::SE => s.to_voigt().to_vec(),
            ConjugatePair::PF => s.to_array().to_vec(),
        }
    }
}

/// Per-feature affine maps to the unit interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub input_min: Vec<f64>,
    pub input_max: Vec<f64>,
    pub stress_min: Vec<f64>,
    pub stress_max: Vec<f64>,
}

impl Normalizer {
    pub fn identity(d: usize) -> Self {
        Self { input_min: vec![0.0; d], input_max: vec![1.0; d], stress_min: vec![0.0; d], stress_max: vec![1.0; d] }
    }

    /// Fits ranges to row-major `n × d` inputs and stresses. Degenerate ranges are widened to 1.
    pub fn fit(inputs: &[f64], stresses: &[f64], d: usize) -> Result<Self> {
        if inputs.is_empty() || inputs.len() % d != 0 || inputs.len() != stresses.len() {
            return Err(Error::Shape { expected: d, got: inputs.len() % d.max(1) });
        }
        let range = |v: &[f64]| {
            let mut lo = vec![f64::INFINITY; d];
            let mut hi = vec![f64::NEG_INFINITY; d];
            for row in v.chunks_exact(d) {
                for a in 0..d {
                    lo[a] = lo[a].min(row[a]);
                    hi[a] = hi[a].max(row[a]);
                }
            }
            for a in 0..d {
                if !(hi[a] - lo[a] > 1e-12) {
                    let mid = 0.5 * (hi[a] + lo[a]);
                    lo[a] = mid - 0.5;
                    hi[a] = mid + 0.5;
                }
            }
            (lo, hi)
        };
        let (input_min, input_max) = range(inputs);
        let (stress_min, stress_max) = range(stresses);
        Ok(Self { input_min, input_max, stress_min, stress_max })
    }

    pub fn dim(&self) -> usize {
        self.input_min.len()
    }

    pub fn input_range(&self, a: usize) -> f64 {
        self.input_max[a] - self.input_min[a]
    }

    pub fn stress_range(&self, a: usize) -> f64 {
        self.stress_max[a] - self.stress_min[a]
    }

    /// Physical energy per unit network output.
    pub fn energy_scale(&self) -> f64 {
        (0..self.dim()).map(|a| self.stress_range(a) * self.input_range(a)).fold(0.0, f64::max)
    }

    pub fn normalize_input(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(a, v)| (v - self.input_min[a]) / self.input_range(a)).collect()
    }

    pub fn denormalize_input(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(a, v)| v * self.input_range(a) + self.input_min[a]).collect()
    }

    pub fn normalize_stress(&self, s: &[f64]) -> Vec<f64> {
        s.iter().enumerate().map(|(a, v)| (v - self.stress_min[a]) / self.stress_range(a)).collect()
    }

    pub fn denormalize_stress(&self, s: &[f64]) -> Vec<f64> {
        s.iter().enumerate().map(|(a, v)| v * self.stress_range(a) + self.stress_min[a]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    /// Hash of the configuration that produced the parameters, empty if untrained.
    pub config_hash: String,
}

/// Architecture knobs for [`ModelBundle::init_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub width: usize,
    pub activation: Activation,
    pub multiply: MultiplyKind,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self { width: 100, activation: Activation::SMOOTH, multiply: MultiplyKind::Square }
    }
}

/// Tangent in the storage class of the conjugate pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tangent {
    SE(Tensor4Voigt6),
    PF(Tensor4Full9),
}

/// Value, stress components and tangent matrix in physical units.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalJet {
    pub energy: f64,
    pub stress: Vec<f64>,
    /// Row-major `d × d`, empty unless requested.
    pub tangent: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub pair: ConjugatePair,
    pub net: EnergyNet,
    pub normalizer: Normalizer,
    pub provenance: Provenance,
}

impl ModelBundle {
    pub fn init(seed: u64, pair: ConjugatePair, activation: Activation) -> Self {
        Self::init_with(seed, pair, NetConfig { activation, ..NetConfig::default() })
    }

    pub fn init_with(seed: u64, pair: ConjugatePair, cfg: NetConfig) -> Self {
        let d = pair.input_dim();
        Self {
            pair,
            net: EnergyNet::standard(d, cfg.width, cfg.activation, cfg.multiply, seed),
            normalizer: Normalizer::identity(d),
            provenance: Provenance { seed, config_hash: String::new() },
        }
    }

    pub fn dim(&self) -> usize {
        self.pair.input_dim()
    }

    /// Consistency of the network, normaliser and tag.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.net.input_dim != d {
            return Err(Error::Shape { expected: d, got: self.net.input_dim });
        }
        let n = &self.normalizer;
        for v in [&n.input_min, &n.input_max, &n.stress_min, &n.stress_max] {
            if v.len() != d {
                return Err(Error::Shape { expected: d, got: v.len() });
            }
        }
        if (0..d).any(|a| !(n.input_range(a) > 0.0) || !(n.stress_range(a) > 0.0)) {
            return Err(Error::Config("normalizer range must be positive".into()));
        }
        self.net.validate().map_err(Error::Config)
    }

    /// `∂ψ/∂x_a = stress_factor(a) · ∂N/∂x̄_a`.
    pub fn stress_factor(&self, a: usize) -> f64 {
        self.normalizer.energy_scale() * self.pair.component_factor(a) / self.normalizer.input_range(a)
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Physical value/stress/tangent at a batch of physical inputs (`n × d`).
    pub fn evaluate_batch(&self, xs: &[f64], order: Order) -> Result<Vec<PhysicalJet>> {
        let d = self.dim();
        if xs.len() % d != 0 {
            return Err(Error::Shape { expected: d, got: xs.len() % d });
        }
        let mut xn = Vec::with_capacity(xs.len());
        for row in xs.chunks_exact(d) {
            xn.extend(self.normalizer.normalize_input(row));
        }
        let jets = self.net.eval(&xn, order);
        let layout = JetLayout::new(d, order);
        let se = self.normalizer.energy_scale();
        let f: Vec<f64> = (0..d).map(|a| self.stress_factor(a)).collect();
        Ok(jets
            .chunks_exact(layout.k)
            .map(|j| {
                let stress = if order == Order::Value { Vec::new() } else { (0..d).map(|a| f[a] * j[1 + a]).collect() };
                let mut tangent = Vec::new();
                if order == Order::Hessian {
                    tangent = vec![0.0; d * d];
                    for a in 0..d {
                        for b in 0..d {
                            tangent[a * d + b] = f[a] * f[b] / se * j[layout.hess_slot(a, b)];
                        }
                    }
                }
                PhysicalJet { energy: se * j[0], stress, tangent }
            })
            .collect())
    }

    fn evaluate(&self, x: &[f64], order: Order) -> Result<PhysicalJet> {
        self.check(x)?;
        Ok(self.evaluate_batch(x, order)?.remove(0))
    }

    pub fn energy(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x, Order::Value)?.energy)
    }

    /// `S` (S–E) or `P` (P–F) at a physical input.
    pub fn stress(&self, x: &[f64]) -> Result<Tensor2> {
        Ok(self.pair.stress_tensor(&self.evaluate(x, Order::Gradient)?.stress))
    }

    pub fn tangent(&self, x: &[f64]) -> Result<Tangent> {
        let j = self.evaluate(x, Order::Hessian)?;
        let d = self.dim();
        Ok(match self.pair {
            ConjugatePair::SE => {
                let mut m = [[0.0; 6]; 6];
                for (a, row) in m.iter_mut().enumerate() {
                    row.copy_from_slice(&j.tangent[a * d..(a + 1) * d]);
                }
                Tangent::SE(Tensor4Voigt6(m))
            }
            ConjugatePair::PF => {
                let mut m = [[0.0; 9]; 9];
                for (a, row) in m.iter_mut().enumerate() {
                    row.copy_from_slice(&j.tangent[a * d..(a + 1) * d]);
                }
                Tangent::PF(Tensor4Full9(m))
            }
        })
    }
}
