//! Feed-forward scalar network with exact Taylor-mode jets.
//!
//! A jet for one point carries the value, the `d` first derivatives and the
//! `d(d+1)/2` packed second derivatives (upper triangle, row-major) with
//! respect to the network input. Activations are stored neuron-major: row `r`
//! holds `npts · K` columns, point `t` occupying columns `t·K .. (t+1)·K`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Rectifier,
    Softplus { sharpness: f64 },
    Identity,
}

impl Activation {
    pub const SMOOTH: Activation = Activation::Softplus { sharpness: 10.0 };

    /// `(σ, σ', σ'', σ''')` at `z`.
    #[inline]
    pub fn eval(&self, z: f64) -> [f64; 4] {
        match *self {
            Activation::Identity => [z, 1.0, 0.0, 0.0],
            Activation::Rectifier => {
                if z > 0.0 {
                    [z, 1.0, 0.0, 0.0]
                } else {
                    [0.0, 0.0, 0.0, 0.0]
                }
            }
            Activation::Softplus { sharpness: b } => {
                let t = b * z;
                let (v, s) = if t >= 0.0 {
                    let e = math::exp(-t);
                    (t + math::ln_1p(e), 1.0 / (1.0 + e))
                } else {
                    let e = math::exp(t);
                    (math::ln_1p(e), e / (1.0 + e))
                };
                let s1 = s * (1.0 - s);
                [v / b, s, b * s1, b * b * s1 * (1.0 - 2.0 * s)]
            }
        }
    }
}

/// Derivative order carried by a jet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Value,
    Gradient,
    Hessian,
}

/// Column layout of a jet over `d` inputs.
#[derive(Clone, Debug)]
pub struct JetLayout {
    pub d: usize,
    pub order: Order,
    pub k: usize,
    /// `(p, q)` for each packed second-derivative slot.
    pub pairs: Vec<(usize, usize)>,
}

impl JetLayout {
    pub fn new(d: usize, order: Order) -> Self {
        let pairs: Vec<(usize, usize)> = match order {
            Order::Hessian => (0..d).flat_map(|p| (p..d).map(move |q| (p, q))).collect(),
            _ => Vec::new(),
        };
        let k = match order {
            Order::Value => 1,
            Order::Gradient => 1 + d,
            Order::Hessian => 1 + d + pairs.len(),
        };
        Self { d, order, k, pairs }
    }

    pub fn n_first(&self) -> usize {
        if self.order == Order::Value {
            0
        } else {
            self.d
        }
    }

    /// Slot of `∂²/∂x_p∂x_q` inside a jet.
    pub fn hess_slot(&self, p: usize, q: usize) -> usize {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        1 + self.d + p * self.d - p * p.saturating_sub(1) / 2 + (q - p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub activation: Activation,
    /// Row-major `outputs × inputs`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        Self { inputs, outputs, activation, weights: vec![0.0; inputs * outputs], bias: vec![0.0; outputs] }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, activation: Activation, rng: &mut R) -> Self {
        let bound = glorot_bound(inputs, outputs);
        let weights = (0..inputs * outputs).map(|_| rng.random_range(-bound..bound)).collect();
        Self { inputs, outputs, activation, weights, bias: vec![0.0; outputs] }
    }

    fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    math::sqrt(6.0 / (fan_in + fan_out) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layer {
    Dense(Dense),
    /// Elementwise square `x ⊙ x`.
    Multiply,
    /// Elementwise product of two parallel branches.
    Product { left: Dense, right: Dense },
}

impl Layer {
    fn n_params(&self) -> usize {
        match self {
            Layer::Dense(d) => d.n_params(),
            Layer::Multiply => 0,
            Layer::Product { left, right } => left.n_params() + right.n_params(),
        }
    }

    fn outputs(&self, inputs: usize) -> usize {
        match self {
            Layer::Dense(d) => d.outputs,
            Layer::Multiply => inputs,
            Layer::Product { left, .. } => left.outputs,
        }
    }
}

/// How the curvature layers are realised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplyKind {
    Square,
    Product,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyNet {
    pub input_dim: usize,
    pub layers: Vec<Layer>,
}

/// Neuron-major jet matrix.
#[derive(Clone, Debug)]
struct JetMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl JetMat {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }
}

enum Aux {
    None,
    /// Pre-activation of a dense layer with a non-identity activation.
    Pre(JetMat),
    Product { u: JetMat, v: JetMat, zu: Option<JetMat>, zv: Option<JetMat> },
}

/// Forward intermediates needed for reverse-mode parameter gradients.
pub struct Tape {
    layout: JetLayout,
    npts: usize,
    inputs: Vec<JetMat>,
    aux: Vec<Aux>,
    output: Vec<f64>,
}

impl Tape {
    /// Output jets, `npts × K` row-major.
    pub fn output(&self) -> &[f64] {
        &self.output
    }

    pub fn layout(&self) -> &JetLayout {
        &self.layout
    }

    pub fn npts(&self) -> usize {
        self.npts
    }
}

impl EnergyNet {
    /// `Dense(width, act) → multiply → multiply → Dense(width, act) → Dense(1, linear)`.
    pub fn standard(input_dim: usize, width: usize, activation: Activation, multiply: MultiplyKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::new();
        layers.push(Layer::Dense(Dense::glorot(input_dim, width, activation, &mut rng)));
        for _ in 0..2 {
            layers.push(match multiply {
                MultiplyKind::Square => Layer::Multiply,
                MultiplyKind::Product => Layer::Product {
                    left: Dense::glorot(width, width, Activation::Identity, &mut rng),
                    right: Dense::glorot(width, width, Activation::Identity, &mut rng),
                },
            });
        }
        layers.push(Layer::Dense(Dense::glorot(width, width, activation, &mut rng)));
        layers.push(Layer::Dense(Dense::glorot(width, 1, Activation::Identity, &mut rng)));
        Self { input_dim, layers }
    }

    /// Checks layer widths chain and end in a scalar.
    pub fn validate(&self) -> core::result::Result<(), alloc::string::String> {
        let mut w = self.input_dim;
        for (i, l) in self.layers.iter().enumerate() {
            let check = |d: &Dense, w: usize| {
                if d.inputs != w || d.weights.len() != d.inputs * d.outputs || d.bias.len() != d.outputs {
                    Err(alloc::format!("layer {i}: inconsistent dense shape"))
                } else {
                    Ok(())
                }
            };
            match l {
                Layer::Dense(d) => check(d, w)?,
                Layer::Multiply => {}
                Layer::Product { left, right } => {
                    check(left, w)?;
                    check(right, w)?;
                    if left.outputs != right.outputs {
                        return Err(alloc::format!("layer {i}: product branches differ in width"));
                    }
                }
            }
            w = l.outputs(w);
        }
        if w != 1 {
            return Err(alloc::format!("network output width is {w}, expected 1"));
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Layer::n_params).sum()
    }

    /// Flat parameter vector: per dense block, weights then bias.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        self.for_each_dense(|d| {
            out.extend_from_slice(&d.weights);
            out.extend_from_slice(&d.bias);
        });
        out
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params(), "parameter length mismatch");
        let mut off = 0;
        self.for_each_dense_mut(|d| {
            let nw = d.weights.len();
            d.weights.copy_from_slice(&p[off..off + nw]);
            off += nw;
            let nb = d.bias.len();
            d.bias.copy_from_slice(&p[off..off + nb]);
            off += nb;
        });
    }

    fn for_each_dense(&self, mut f: impl FnMut(&Dense)) {
        for l in &self.layers {
            match l {
                Layer::Dense(d) => f(d),
                Layer::Multiply => {}
                Layer::Product { left, right } => {
                    f(left);
                    f(right);
                }
            }
        }
    }

    fn for_each_dense_mut(&mut self, mut f: impl FnMut(&mut Dense)) {
        for l in &mut self.layers {
            match l {
                Layer::Dense(d) => f(d),
                Layer::Multiply => {}
                Layer::Product { left, right } => {
                    f(left);
                    f(right);
                }
            }
        }
    }

    /// Output jets for `xs` (`npts × input_dim`), `npts × K` row-major.
    pub fn eval(&self, xs: &[f64], order: Order) -> Vec<f64> {
        self.run(xs, order, false).output
    }

    /// Forward pass keeping the intermediates for [`EnergyNet::backward`].
    pub fn forward(&self, xs: &[f64], order: Order) -> Tape {
        self.run(xs, order, true)
    }

    fn run(&self, xs: &[f64], order: Order, keep: bool) -> Tape {
        let d = self.input_dim;
        assert_eq!(xs.len() % d, 0, "input length is not a multiple of the input width");
        let npts = xs.len() / d;
        let layout = JetLayout::new(d, order);
        let k = layout.k;
        let mut x = JetMat::zeros(d, npts * k);
        for t in 0..npts {
            for a in 0..d {
                x.data[a * x.cols + t * k] = xs[t * d + a];
                if order != Order::Value {
                    x.data[a * x.cols + t * k + 1 + a] = 1.0;
                }
            }
        }
        let mut inputs = Vec::new();
        let mut aux = Vec::new();
        for layer in &self.layers {
            let (y, a) = match layer {
                Layer::Dense(dl) => {
                    let z = dense_forward(dl, &x, npts, k);
                    if dl.activation == Activation::Identity {
                        (z, Aux::None)
                    } else {
                        let y = activation_forward(dl.activation, &z, &layout, npts);
                        (y, if keep { Aux::Pre(z) } else { Aux::None })
                    }
                }
                Layer::Multiply => (product_forward(&x, &x, &layout, npts), Aux::None),
                Layer::Product { left, right } => {
                    let (u, zu) = branch_forward(left, &x, &layout, npts);
                    let (v, zv) = branch_forward(right, &x, &layout, npts);
                    let y = product_forward(&u, &v, &layout, npts);
                    (y, if keep { Aux::Product { u, v, zu, zv } } else { Aux::None })
                }
            };
            if keep {
                inputs.push(core::mem::replace(&mut x, y));
                aux.push(a);
            } else {
                x = y;
            }
        }
        assert_eq!(x.rows, 1, "network must end in a scalar");
        Tape { layout, npts, inputs, aux, output: x.data }
    }

    /// Parameter gradient of `Σ_t Σ_c adj[t·K + c] · jet[t·K + c]`, accumulated into `grad`.
    pub fn backward(&self, tape: &Tape, adj: &[f64], grad: &mut [f64]) {
        let layout = &tape.layout;
        let npts = tape.npts;
        let k = layout.k;
        assert_eq!(adj.len(), npts * k, "adjoint length mismatch");
        assert_eq!(grad.len(), self.n_params(), "gradient length mismatch");
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut off = 0;
        for l in &self.layers {
            offsets.push(off);
            off += l.n_params();
        }
        let mut ybar = JetMat { rows: 1, cols: npts * k, data: adj.to_vec() };
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let x = &tape.inputs[li];
            let off = offsets[li];
            let xbar = match (layer, &tape.aux[li]) {
                (Layer::Dense(dl), aux) => {
                    let zbar = match aux {
                        Aux::Pre(z) => activation_backward(dl.activation, z, &ybar, layout, npts),
                        _ => ybar,
                    };
                    dense_backward(dl, x, &zbar, npts, k, &mut grad[off..off + dl.n_params()])
                }
                (Layer::Multiply, _) => {
                    let (mut ub, vb) = product_backward(x, x, &ybar, layout, npts);
                    for (a, b) in ub.data.iter_mut().zip(vb.data.iter()) {
                        *a += b;
                    }
                    ub
                }
                (Layer::Product { left, right }, Aux::Product { u, v, zu, zv }) => {
                    let (ub, vb) = product_backward(u, v, &ybar, layout, npts);
                    let nl = left.n_params();
                    let (gl, gr) = grad[off..off + nl + right.n_params()].split_at_mut(nl);
                    let mut xb = branch_backward(left, x, zu.as_ref(), ub, layout, npts, gl);
                    let xr = branch_backward(right, x, zv.as_ref(), vb, layout, npts, gr);
                    for (a, b) in xb.data.iter_mut().zip(xr.data.iter()) {
                        *a += b;
                    }
                    xb
                }
                (Layer::Product { .. }, _) => unreachable!("tape is missing product intermediates"),
            };
            ybar = xbar;
        }
    }
}

fn branch_forward(dl: &Dense, x: &JetMat, layout: &JetLayout, npts: usize) -> (JetMat, Option<JetMat>) {
    let z = dense_forward(dl, x, npts, layout.k);
    if dl.activation == Activation::Identity {
        (z, None)
    } else {
        (activation_forward(dl.activation, &z, layout, npts), Some(z))
    }
}

fn branch_backward(
    dl: &Dense,
    x: &JetMat,
    z: Option<&JetMat>,
    ybar: JetMat,
    layout: &JetLayout,
    npts: usize,
    grad: &mut [f64],
) -> JetMat {
    let zbar = match z {
        Some(z) => activation_backward(dl.activation, z, &ybar, layout, npts),
        None => ybar,
    };
    dense_backward(dl, x, &zbar, npts, layout.k, grad)
}

/// Row-major `C = alpha · op(A) · op(B) + beta · C` via strides.
#[allow(unsafe_code)]
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    kk: usize,
    n: usize,
    a: &[f64],
    rsa: usize,
    csa: usize,
    b: &[f64],
    rsb: usize,
    csb: usize,
    beta: f64,
    c: &mut [f64],
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(kk == 0 || (a.len() > (m - 1) * rsa + (kk - 1) * csa && b.len() > (kk - 1) * rsb + (n - 1) * csb));
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above bound every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            kk,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

fn dense_forward(dl: &Dense, x: &JetMat, npts: usize, k: usize) -> JetMat {
    debug_assert_eq!(x.rows, dl.inputs);
    let cols = x.cols;
    let mut z = JetMat::zeros(dl.outputs, cols);
    gemm(dl.outputs, dl.inputs, cols, &dl.weights, dl.inputs, 1, &x.data, cols, 1, 0.0, &mut z.data);
    for r in 0..dl.outputs {
        let b = dl.bias[r];
        let row = &mut z.data[r * cols..(r + 1) * cols];
        for t in 0..npts {
            row[t * k] += b;
        }
    }
    z
}

/// Accumulates `W̄ += Z̄ Xᵀ`, `b̄ += Σ value columns of Z̄` and returns `X̄ = Wᵀ Z̄`.
fn dense_backward(dl: &Dense, x: &JetMat, zbar: &JetMat, npts: usize, k: usize, grad: &mut [f64]) -> JetMat {
    let cols = x.cols;
    let nw = dl.weights.len();
    let (gw, gb) = grad.split_at_mut(nw);
    gemm(dl.outputs, cols, dl.inputs, &zbar.data, cols, 1, &x.data, 1, cols, 1.0, gw);
    for r in 0..dl.outputs {
        let row = &zbar.data[r * cols..(r + 1) * cols];
        let mut s = 0.0;
        for t in 0..npts {
            s += row[t * k];
        }
        gb[r] += s;
    }
    let mut xbar = JetMat::zeros(dl.inputs, cols);
    gemm(dl.inputs, dl.outputs, cols, &dl.weights, 1, dl.inputs, &zbar.data, cols, 1, 0.0, &mut xbar.data);
    xbar
}

fn activation_forward(act: Activation, z: &JetMat, layout: &JetLayout, npts: usize) -> JetMat {
    let k = layout.k;
    let d = layout.n_first();
    let mut y = JetMat::zeros(z.rows, z.cols);
    for (zrow, yrow) in z.data.chunks_exact(z.cols).zip(y.data.chunks_exact_mut(z.cols)) {
        for t in 0..npts {
            let zj = &zrow[t * k..(t + 1) * k];
            let yj = &mut yrow[t * k..(t + 1) * k];
            let [s0, s1, s2, _] = act.eval(zj[0]);
            yj[0] = s0;
            for p in 0..d {
                yj[1 + p] = s1 * zj[1 + p];
            }
            for (idx, &(p, q)) in layout.pairs.iter().enumerate() {
                let c = 1 + d + idx;
                yj[c] = s2 * zj[1 + p] * zj[1 + q] + s1 * zj[c];
            }
        }
    }
    y
}

fn activation_backward(act: Activation, z: &JetMat, ybar: &JetMat, layout: &JetLayout, npts: usize) -> JetMat {
    let k = layout.k;
    let d = layout.n_first();
    let mut zbar = JetMat::zeros(z.rows, z.cols);
    for ((zrow, brow), orow) in
        z.data.chunks_exact(z.cols).zip(ybar.data.chunks_exact(z.cols)).zip(zbar.data.chunks_exact_mut(z.cols))
    {
        for t in 0..npts {
            let zj = &zrow[t * k..(t + 1) * k];
            let bj = &brow[t * k..(t + 1) * k];
            let oj = &mut orow[t * k..(t + 1) * k];
            let [_, s1, s2, s3] = act.eval(zj[0]);
            let mut v = bj[0] * s1;
            for p in 0..d {
                v += bj[1 + p] * s2 * zj[1 + p];
                oj[1 + p] = bj[1 + p] * s1;
            }
            for (idx, &(p, q)) in layout.pairs.iter().enumerate() {
                let c = 1 + d + idx;
                let b = bj[c];
                v += b * (s3 * zj[1 + p] * zj[1 + q] + s2 * zj[c]);
                oj[1 + p] += b * s2 * zj[1 + q];
                oj[1 + q] += b * s2 * zj[1 + p];
                oj[c] = b * s1;
            }
            oj[0] = v;
        }
    }
    zbar
}

fn product_forward(u: &JetMat, v: &JetMat, layout: &JetLayout, npts: usize) -> JetMat {
    let k = layout.k;
    let d = layout.n_first();
    let mut y = JetMat::zeros(u.rows, u.cols);
    for ((urow, vrow), yrow) in
        u.data.chunks_exact(u.cols).zip(v.data.chunks_exact(u.cols)).zip(y.data.chunks_exact_mut(u.cols))
    {
        for t in 0..npts {
            let uj = &urow[t * k..(t + 1) * k];
            let vj = &vrow[t * k..(t + 1) * k];
            let yj = &mut yrow[t * k..(t + 1) * k];
            yj[0] = uj[0] * vj[0];
            for p in 0..d {
                yj[1 + p] = uj[1 + p] * vj[0] + uj[0] * vj[1 + p];
            }
            for (idx, &(p, q)) in layout.pairs.iter().enumerate() {
                let c = 1 + d + idx;
                yj[c] = uj[c] * vj[0] + uj[1 + p] * vj[1 + q] + uj[1 + q] * vj[1 + p] + uj[0] * vj[c];
            }
        }
    }
    y
}

fn product_backward(u: &JetMat, v: &JetMat, ybar: &JetMat, layout: &JetLayout, npts: usize) -> (JetMat, JetMat) {
    let k = layout.k;
    let d = layout.n_first();
    let cols = u.cols;
    let mut ub = JetMat::zeros(u.rows, cols);
    let mut vb = JetMat::zeros(u.rows, cols);
    for r in 0..u.rows {
        let range = r * cols..(r + 1) * cols;
        let (urow, vrow, brow) = (&u.data[range.clone()], &v.data[range.clone()], &ybar.data[range.clone()]);
        let (ubrow, vbrow) = (&mut ub.data[range.clone()], &mut vb.data[range]);
        for t in 0..npts {
            let s = t * k..(t + 1) * k;
            let (uj, vj, bj) = (&urow[s.clone()], &vrow[s.clone()], &brow[s.clone()]);
            let (uo, vo) = (&mut ubrow[s.clone()], &mut vbrow[s]);
            let mut u0 = bj[0] * vj[0];
            let mut v0 = bj[0] * uj[0];
            for p in 0..d {
                let b = bj[1 + p];
                u0 += b * vj[1 + p];
                v0 += b * uj[1 + p];
                uo[1 + p] = b * vj[0];
                vo[1 + p] = b * uj[0];
            }
            for (idx, &(p, q)) in layout.pairs.iter().enumerate() {
                let c = 1 + d + idx;
                let b = bj[c];
                u0 += b * vj[c];
                v0 += b * uj[c];
                uo[1 + p] += b * vj[1 + q];
                uo[1 + q] += b * vj[1 + p];
                vo[1 + p] += b * uj[1 + q];
                vo[1 + q] += b * uj[1 + p];
                uo[c] = b * vj[0];
                vo[c] = b * uj[0];
            }
            uo[0] = u0;
            vo[0] = v0;
        }
    }
    (ub, vb)
}
