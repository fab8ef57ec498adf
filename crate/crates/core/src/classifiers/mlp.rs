//! Feed-forward network: ReLU hidden layers, one sigmoid output, trained by
//! mini-batch SGD on mean binary cross-entropy.

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{bce_with_logit, check_dim, check_training_set, finite, sigmoid};
use crate::error::{Error, Result};
use crate::seed;
use crate::vector::FeatureRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: vec![100],
            lr: 1e-3,
            epochs: 200,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Dense layer. `weights` is `inputs x outputs`, row-major by input so a
/// sparse input only touches the rows of its nonzero features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn glorot(inputs: usize, outputs: usize, rng: &mut seed::Rng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit);
        Self {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| dist.sample(rng)).collect(),
            bias: vec![0.0; outputs],
        }
    }

    fn row(&self, input: usize) -> &[f64] {
        &self.weights[input * self.outputs..(input + 1) * self.outputs]
    }

    fn forward_dense(&self, a: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.bias);
        for (j, &aj) in a.iter().enumerate() {
            if aj != 0.0 {
                for (o, w) in out.iter_mut().zip(self.row(j)) {
                    *o += aj * w;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
}

/// Per-layer `(weights, bias)` gradients with the same layout as [`Layer`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    fn zeros_like(net: &Mlp) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()]))
                .collect(),
        }
    }

    /// Concatenation in [`Mlp::parameters`] order.
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
            .collect()
    }
}

/// Records which first-layer weight rows a mini-batch touched, so sparse
/// inputs do not pay for a dense first-layer update.
struct TouchedRows {
    mask: Vec<bool>,
    rows: Vec<usize>,
}

impl TouchedRows {
    fn new(n: usize) -> Self {
        Self {
            mask: vec![false; n],
            rows: Vec::new(),
        }
    }

    fn mark(&mut self, row: usize) {
        if !self.mask[row] {
            self.mask[row] = true;
            self.rows.push(row);
        }
    }

    fn drain(&mut self) -> Vec<usize> {
        for &r in &self.rows {
            self.mask[r] = false;
        }
        std::mem::take(&mut self.rows)
    }
}

impl Mlp {
    /// `sizes` is `[in, h1, ..., 1]`.
    pub fn new(sizes: &[usize], seed_value: u64) -> Result<Self> {
        if sizes.len() < 3 {
            return Err(Error::InvalidArchitecture(
                "need an input, at least one hidden layer and an output".into(),
            ));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidArchitecture(format!("zero-width layer in {sizes:?}")));
        }
        if sizes[sizes.len() - 1] != 1 {
            return Err(Error::InvalidArchitecture("output layer must have width 1".into()));
        }
        let mut rng = seed::rng(seed::derive(seed_value, "mlp/init"));
        Ok(Self {
            layers: sizes
                .windows(2)
                .map(|w| Layer::glorot(w[0], w[1], &mut rng))
                .collect(),
        })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        let net = Self { layers };
        net.validate()?;
        Ok(net)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    /// Hidden activations per layer followed by the output logit.
    fn forward<R: FeatureRow>(&self, x: &R) -> (Vec<Vec<f64>>, f64) {
        let first = &self.layers[0];
        let mut z = first.bias.clone();
        x.for_each_value(|j, v| {
            if v != 0.0 {
                for (o, w) in z.iter_mut().zip(first.row(j)) {
                    *o += v * w;
                }
            }
        });
        let mut activations = Vec::with_capacity(self.layers.len() - 1);
        for layer in &self.layers[1..] {
            z.iter_mut().for_each(|v| *v = v.max(0.0));
            let mut next = vec![0.0; layer.outputs];
            layer.forward_dense(&z, &mut next);
            activations.push(std::mem::replace(&mut z, next));
        }
        (activations, z[0])
    }

    pub fn predict_proba<R: FeatureRow>(&self, x: &R) -> Result<f64> {
        check_dim(self.input_dim(), x)?;
        Ok(sigmoid(self.forward(x).1))
    }

    /// Adds one sample's loss gradient into `grads`; returns its loss.
    fn backprop<R: FeatureRow>(
        &self,
        x: &R,
        y: bool,
        grads: &mut Gradients,
        touched: &mut TouchedRows,
    ) -> f64 {
        let (activations, logit) = self.forward(x);
        let mut delta = vec![sigmoid(logit) - f64::from(u8::from(y))];
        for l in (1..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &activations[l - 1];
            let (gw, gb) = &mut grads.layers[l];
            for (g, d) in gb.iter_mut().zip(&delta) {
                *g += d;
            }
            for (j, &a) in input.iter().enumerate() {
                if a != 0.0 {
                    for (g, d) in gw[j * layer.outputs..(j + 1) * layer.outputs]
                        .iter_mut()
                        .zip(&delta)
                    {
                        *g += a * d;
                    }
                }
            }
            // ReLU passes gradient only where the activation is positive.
            delta = input
                .iter()
                .enumerate()
                .map(|(j, &a)| {
                    if a > 0.0 {
                        layer.row(j).iter().zip(&delta).map(|(w, d)| w * d).sum()
                    } else {
                        0.0
                    }
                })
                .collect();
        }
        let first = &self.layers[0];
        let (gw, gb) = &mut grads.layers[0];
        for (g, d) in gb.iter_mut().zip(&delta) {
            *g += d;
        }
        x.for_each_value(|j, v| {
            touched.mark(j);
            if v != 0.0 {
                for (g, d) in gw[j * first.outputs..(j + 1) * first.outputs]
                    .iter_mut()
                    .zip(&delta)
                {
                    *g += v * d;
                }
            }
        });
        bce_with_logit(logit, y)
    }

    /// Mean loss over `(x, y)` and its exact gradient.
    pub fn loss_and_gradients<R: FeatureRow>(&self, x: &[R], y: &[bool]) -> (f64, Gradients) {
        let mut grads = Gradients::zeros_like(self);
        let mut touched = TouchedRows::new(self.input_dim());
        let mut loss = 0.0;
        for (row, &t) in x.iter().zip(y) {
            loss += self.backprop(row, t, &mut grads, &mut touched);
        }
        let inv = 1.0 / x.len() as f64;
        for (w, b) in &mut grads.layers {
            w.iter_mut().chain(b.iter_mut()).for_each(|g| *g *= inv);
        }
        (loss * inv, grads)
    }

    pub fn loss<R: FeatureRow>(&self, x: &[R], y: &[bool]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(row, &t)| bce_with_logit(self.forward(row).1, t))
            .sum::<f64>()
            / x.len() as f64
    }

    /// All weights and biases, layer by layer, weights before bias.
    pub fn parameters(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    /// Inverse of [`parameters`](Self::parameters).
    pub fn set_parameters(&mut self, params: &[f64]) {
        let mut it = params.iter().copied();
        for l in &mut self.layers {
            for p in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *p = it.next().expect("parameter vector too short");
            }
        }
        assert!(it.next().is_none(), "parameter vector too long");
    }

    /// Applies `-lr * grads` and clears the gradient buffers. Only touched
    /// rows of the first layer are visited.
    fn apply(&mut self, grads: &mut Gradients, lr: f64, rows: &[usize]) {
        for (l, (layer, (gw, gb))) in self.layers.iter_mut().zip(&mut grads.layers).enumerate() {
            for (b, g) in layer.bias.iter_mut().zip(gb.iter_mut()) {
                *b -= lr * *g;
                *g = 0.0;
            }
            let out = layer.outputs;
            let mut step_row = |j: usize| {
                for (w, g) in layer.weights[j * out..(j + 1) * out]
                    .iter_mut()
                    .zip(&mut gw[j * out..(j + 1) * out])
                {
                    *w -= lr * *g;
                    *g = 0.0;
                }
            };
            if l == 0 {
                rows.iter().for_each(|&j| step_row(j));
            } else {
                (0..layer.inputs).for_each(step_row);
            }
        }
    }

    pub fn fit<R: FeatureRow>(x: &[R], y: &[bool], config: &MlpConfig) -> Result<Self> {
        Self::fit_with_history(x, y, config).map(|(m, _)| m)
    }

    /// Trains and returns the mean training loss measured during each epoch.
    pub fn fit_with_history<R: FeatureRow>(
        x: &[R],
        y: &[bool],
        config: &MlpConfig,
    ) -> Result<(Self, Vec<f64>)> {
        if config.hidden.is_empty() {
            return Err(Error::InvalidArchitecture("at least one hidden layer required".into()));
        }
        if config.batch_size == 0 || !(config.lr > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mlp needs batch_size >= 1 and lr > 0, got {} and {}",
                config.batch_size, config.lr
            )));
        }
        let dim = check_training_set(x, y)?;
        let mut sizes = vec![dim];
        sizes.extend(&config.hidden);
        sizes.push(1);
        let mut net = Self::new(&sizes, config.seed)?;

        let mut grads = Gradients::zeros_like(&net);
        let mut touched = TouchedRows::new(dim);
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut history = Vec::with_capacity(config.epochs);
        for epoch in 0..config.epochs {
            let mut rng = seed::rng(seed::derive(config.seed, &format!("mlp/epoch{epoch}")));
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for batch in order.chunks(config.batch_size) {
                for &i in batch {
                    epoch_loss += net.backprop(&x[i], y[i], &mut grads, &mut touched);
                }
                let rows = touched.drain();
                net.apply(&mut grads, config.lr / batch.len() as f64, &rows);
            }
            history.push(epoch_loss / x.len() as f64);
        }
        Ok((net, history))
    }

    pub(super) fn validate(&self) -> Result<()> {
        let Some(last) = self.layers.last() else {
            return Err(Error::InvalidArchitecture("no layers".into()));
        };
        if self.layers.len() < 2 || last.outputs != 1 {
            return Err(Error::InvalidArchitecture(
                "need at least one hidden layer and a width-1 output".into(),
            ));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(Error::InvalidArchitecture(format!("layer {i} has wrong shape")));
            }
            if i > 0 && self.layers[i - 1].outputs != l.inputs {
                return Err(Error::InvalidArchitecture(format!(
                    "layer {i} expects {} inputs, previous layer gives {}",
                    l.inputs,
                    self.layers[i - 1].outputs
                )));
            }
            finite(&l.weights, "mlp weights")?;
            finite(&l.bias, "mlp bias")?;
        }
        Ok(())
    }
}
