//! GIN-0 network: forward pass, hand-written backward pass and readouts.
//!
//! Layer `k` computes
//! `h_k(v) = relu(W2 relu(W1 ((1 + eps) h_{k-1}(v) + sum_{u in N(v)} h_{k-1}(u)) + b1) + b2)`
//! with `eps = 0`. Each layer's node states are sum-pooled; the classifier
//! adds one linear head per layer. There is no batch normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gin::features::FeatureConfig;
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::rng::Rng;

pub const DEFAULT_LAYERS: usize = 5;
pub const DEFAULT_HIDDEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Sum of the per-layer pooled vectors (`hidden` wide).
    Sum,
    /// Concatenation of the per-layer pooled vectors (`layers * hidden` wide).
    Concat,
}

/// `y = x W + b` with `W` stored `in x out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl Linear {
    pub fn zeros(input: usize, output: usize) -> Self {
        Linear {
            weight: Matrix::zeros(input, output),
            bias: vec![0.0; output],
        }
    }

    /// Uniform weights in ±1/sqrt(fan_in), zero bias.
    pub fn uniform_fan_in(input: usize, output: usize, rng: &mut Rng) -> Self {
        let limit = 1.0 / (input as f64).sqrt();
        let mut lin = Linear::zeros(input, output);
        for w in lin.weight.as_mut_slice() {
            *w = (2.0 * rng.next_f64() - 1.0) * limit;
        }
        lin
    }

    pub fn input_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.cols()
    }

    fn forward(&self, x: &Matrix) -> Matrix {
        let mut y = x.matmul(&self.weight);
        for r in 0..y.rows() {
            for (o, b) in y.row_mut(r).iter_mut().zip(&self.bias) {
                *o += b;
            }
        }
        y
    }

    fn forward_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.bias.clone();
        for (k, &a) in x.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (o, w) in y.iter_mut().zip(self.weight.row(k)) {
                *o += a * w;
            }
        }
        y
    }

    /// Accumulates `dW += xᵀ dy`, `db += colsum(dy)` into `grad` and returns
    /// `dx = dy Wᵀ` when `want_input` is set.
    fn backward(&self, x: &Matrix, dy: &Matrix, grad: &mut Linear, want_input: bool) -> Option<Matrix> {
        let (inp, out) = (self.input_dim(), self.output_dim());
        for r in 0..x.rows() {
            let dyr = dy.row(r);
            for (k, &xv) in x.row(r).iter().enumerate() {
                if xv == 0.0 {
                    continue;
                }
                for (g, d) in grad.weight.row_mut(k).iter_mut().zip(dyr) {
                    *g += xv * d;
                }
            }
            for (g, d) in grad.bias.iter_mut().zip(dyr) {
                *g += d;
            }
        }
        if !want_input {
            return None;
        }
        let mut dx = Matrix::zeros(x.rows(), inp);
        for r in 0..x.rows() {
            let dyr = dy.row(r);
            let dxr = dx.row_mut(r);
            for (k, v) in dxr.iter_mut().enumerate() {
                let wk = self.weight.row(k);
                let mut s = 0.0;
                for j in 0..out {
                    s += dyr[j] * wk[j];
                }
                *v = s;
            }
        }
        Some(dx)
    }

    fn tensors_mut(&mut self) -> [&mut [f64]; 2] {
        [self.weight.as_mut_slice(), &mut self.bias]
    }

    fn tensors(&self) -> [&[f64]; 2] {
        [self.weight.as_slice(), &self.bias]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GinLayer {
    pub lin1: Linear,
    pub lin2: Linear,
    /// Fixed at 0 (GIN-0).
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GinModel {
    pub layers: Vec<GinLayer>,
    /// One classifier head per layer, `hidden x classes`.
    pub heads: Vec<Linear>,
    pub readout: Readout,
    pub feature_config: FeatureConfig,
    pub class_count: usize,
    /// False for a randomly initialized model used without training.
    pub trained: bool,
}

/// Per-layer pooled vectors and class logits.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    pub pooled: Vec<Vec<f64>>,
    pub logits: Vec<f64>,
}

/// Activations kept for the backward pass.
struct LayerCache {
    aggregated: Matrix,
    pre1: Matrix,
    act1: Matrix,
    pre2: Matrix,
    out: Matrix,
}

/// Gradient buffers shaped like the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Linear, Linear)>,
    pub heads: Vec<Linear>,
}

impl Gradients {
    pub fn zeros_like(model: &GinModel) -> Self {
        Gradients {
            layers: model
                .layers
                .iter()
                .map(|l| {
                    (
                        Linear::zeros(l.lin1.input_dim(), l.lin1.output_dim()),
                        Linear::zeros(l.lin2.input_dim(), l.lin2.output_dim()),
                    )
                })
                .collect(),
            heads: model
                .heads
                .iter()
                .map(|h| Linear::zeros(h.input_dim(), h.output_dim()))
                .collect(),
        }
    }

    /// Same order as [`GinModel::tensors_mut`].
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for (a, b) in &self.layers {
            out.extend(a.tensors());
            out.extend(b.tensors());
        }
        for h in &self.heads {
            out.extend(h.tensors());
        }
        out
    }

    pub fn scale(&mut self, factor: f64) {
        for (a, b) in self.layers.iter_mut() {
            for t in a.tensors_mut().into_iter().chain(b.tensors_mut()) {
                t.iter_mut().for_each(|x| *x *= factor);
            }
        }
        for h in self.heads.iter_mut() {
            for t in h.tensors_mut() {
                t.iter_mut().for_each(|x| *x *= factor);
            }
        }
    }
}

fn relu_in_place(m: &mut Matrix) {
    for v in m.as_mut_slice() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// `(1 + eps) h(v) + sum over neighbors`; the adjacency is symmetric so the
/// same operator is its own transpose in the backward pass.
fn aggregate(g: &Graph, h: &Matrix, epsilon: f64) -> Matrix {
    let mut z = h.clone();
    if epsilon != 0.0 {
        z.as_mut_slice().iter_mut().for_each(|x| *x *= 1.0 + epsilon);
    }
    for &(u, v) in g.edges() {
        for c in 0..h.cols() {
            let (hu, hv) = (h[(u, c)], h[(v, c)]);
            z[(u, c)] += hv;
            z[(v, c)] += hu;
        }
    }
    z
}

fn column_sums(m: &Matrix) -> Vec<f64> {
    let mut s = vec![0.0; m.cols()];
    for r in 0..m.rows() {
        for (a, b) in s.iter_mut().zip(m.row(r)) {
            *a += b;
        }
    }
    s
}

impl GinModel {
    /// Randomly initialized model.
    pub fn new(
        feature_config: FeatureConfig,
        class_count: usize,
        layers: usize,
        hidden: usize,
        readout: Readout,
        rng: &mut Rng,
    ) -> Result<Self> {
        let input = feature_config.input_dim();
        if input == 0 {
            return Err(Error::param("feature configuration has zero input dimension"));
        }
        if layers == 0 || hidden == 0 || class_count == 0 {
            return Err(Error::param("layers, hidden size and class count must be positive"));
        }
        let mut dims = input;
        let mut gin_layers = Vec::with_capacity(layers);
        for _ in 0..layers {
            gin_layers.push(GinLayer {
                lin1: Linear::uniform_fan_in(dims, hidden, rng),
                lin2: Linear::uniform_fan_in(hidden, hidden, rng),
                epsilon: 0.0,
            });
            dims = hidden;
        }
        let heads = (0..layers)
            .map(|_| Linear::uniform_fan_in(hidden, class_count, rng))
            .collect();
        Ok(GinModel {
            layers: gin_layers,
            heads,
            readout,
            feature_config,
            class_count,
            trained: false,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].lin1.input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.layers[0].lin2.output_dim()
    }

    pub fn embedding_dim(&self) -> usize {
        match self.readout {
            Readout::Sum => self.hidden_dim(),
            Readout::Concat => self.hidden_dim() * self.layers.len(),
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for l in self.layers.iter_mut() {
            out.extend(l.lin1.tensors_mut());
            out.extend(l.lin2.tensors_mut());
        }
        for h in self.heads.iter_mut() {
            out.extend(h.tensors_mut());
        }
        out
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend(l.lin1.tensors());
            out.extend(l.lin2.tensors());
        }
        for h in &self.heads {
            out.extend(h.tensors());
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    fn check_features(&self, g: &Graph, x: &Matrix) -> Result<()> {
        if x.cols() != self.input_dim() || x.rows() != g.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "features are {}x{}, model expects {}x{}",
                x.rows(),
                x.cols(),
                g.node_count(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    fn forward_cached(&self, g: &Graph, x: &Matrix) -> (Vec<LayerCache>, ForwardOutput) {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut pooled = Vec::with_capacity(self.layers.len());
        let mut logits = vec![0.0; self.class_count];
        let mut h = x.clone();
        for (layer, head) in self.layers.iter().zip(&self.heads) {
            let aggregated = aggregate(g, &h, layer.epsilon);
            let pre1 = layer.lin1.forward(&aggregated);
            let mut act1 = pre1.clone();
            relu_in_place(&mut act1);
            let pre2 = layer.lin2.forward(&act1);
            let mut out = pre2.clone();
            relu_in_place(&mut out);
            let p = column_sums(&out);
            for (l, v) in logits.iter_mut().zip(head.forward_vec(&p)) {
                *l += v;
            }
            pooled.push(p);
            h = out.clone();
            caches.push(LayerCache {
                aggregated,
                pre1,
                act1,
                pre2,
                out,
            });
        }
        (caches, ForwardOutput { pooled, logits })
    }

    pub fn forward(&self, g: &Graph, x: &Matrix) -> Result<ForwardOutput> {
        self.check_features(g, x)?;
        Ok(self.forward_cached(g, x).1)
    }

    /// Readout of the per-layer pooled vectors.
    pub fn readout_vector(&self, out: &ForwardOutput) -> Vec<f64> {
        match self.readout {
            Readout::Concat => out.pooled.concat(),
            Readout::Sum => {
                let mut s = vec![0.0; self.hidden_dim()];
                for p in &out.pooled {
                    for (a, b) in s.iter_mut().zip(p) {
                        *a += b;
                    }
                }
                s
            }
        }
    }

    /// Cross-entropy of one graph; adds `scale * dLoss/dθ` into `grad`.
    pub fn loss_and_backward(
        &self,
        g: &Graph,
        x: &Matrix,
        target: usize,
        scale: f64,
        grad: &mut Gradients,
    ) -> Result<(f64, ForwardOutput)> {
        self.check_features(g, x)?;
        if target >= self.class_count {
            return Err(Error::param(format!("class {target} out of range")));
        }
        let (caches, out) = self.forward_cached(g, x);
        let (loss, probs) = softmax_cross_entropy(&out.logits, target);
        let mut dlogits = probs;
        dlogits[target] -= 1.0;
        dlogits.iter_mut().for_each(|d| *d *= scale);

        let layers = self.layers.len();
        let mut dh_next: Option<Matrix> = None;
        for k in (0..layers).rev() {
            let layer = &self.layers[k];
            let cache = &caches[k];
            let head = &self.heads[k];
            let head_grad = &mut grad.heads[k];
            let pooled = &out.pooled[k];
            // head: logits += pooled W + b
            let mut dpooled = vec![0.0; pooled.len()];
            for (i, &p) in pooled.iter().enumerate() {
                let wrow = head.weight.row(i);
                let grow = head_grad.weight.row_mut(i);
                let mut s = 0.0;
                for c in 0..dlogits.len() {
                    grow[c] += p * dlogits[c];
                    s += wrow[c] * dlogits[c];
                }
                dpooled[i] = s;
            }
            for (b, d) in head_grad.bias.iter_mut().zip(&dlogits) {
                *b += d;
            }
            // pooling broadcasts to every node, plus the next layer's input gradient
            let mut dout = match dh_next.take() {
                Some(m) => m,
                None => Matrix::zeros(cache.out.rows(), cache.out.cols()),
            };
            for r in 0..dout.rows() {
                for (d, p) in dout.row_mut(r).iter_mut().zip(&dpooled) {
                    *d += p;
                }
            }
            mask_relu(&mut dout, &cache.pre2);
            let (g1, g2) = &mut grad.layers[k];
            let mut dact1 = layer
                .lin2
                .backward(&cache.act1, &dout, g2, true)
                .expect("input gradient requested");
            mask_relu(&mut dact1, &cache.pre1);
            let need_input = k > 0;
            if let Some(dagg) = layer.lin1.backward(&cache.aggregated, &dact1, g1, need_input) {
                dh_next = Some(aggregate(g, &dagg, layer.epsilon));
            }
        }
        Ok((loss, out))
    }
}

fn mask_relu(d: &mut Matrix, pre: &Matrix) {
    for (g, &p) in d.as_mut_slice().iter_mut().zip(pre.as_slice()) {
        if p <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Loss `-log softmax(logits)[target]` and the softmax probabilities.
pub fn softmax_cross_entropy(logits: &[f64], target: usize) -> (f64, Vec<f64>) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let loss = total.ln() - (logits[target] - max);
    (loss, exps.into_iter().map(|e| e / total).collect())
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
