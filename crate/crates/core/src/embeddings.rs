//! Skip-gram word vectors and their aggregation into document vectors.
//!
//! Each vocabulary word owns a central vector `v` (used when the word is the
//! target) and a context vector `u` (used when it is predicted). The reference
//! objective is the full-softmax log-likelihood
//!
//! ```text
//! log P(o | c) = u_o · v_c - log Σ_i exp(u_i · v_c)
//! ```
//!
//! maximized by plain SGD over every (center, context) pair. Negative
//! sampling replaces the softmax by `k` logistic contrasts and is much cheaper
//! on large vocabularies.

use std::collections::HashMap;

use rand::distributions::{Distribution, Uniform, WeightedIndex};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::artifact::{check_version, VERSION};
use crate::error::{Error, Result};
use crate::features::Vocabulary;
use crate::preprocess::TokenDoc;
use crate::seed;
pub use crate::vector::DenseVector;

/// `(center, context)` vocabulary indices within `window` positions.
/// Out-of-vocabulary tokens produce no pairs but still occupy a position.
pub fn extract_pairs(doc: &TokenDoc, vocab: &Vocabulary, window: usize) -> Vec<(usize, usize)> {
    let ids: Vec<Option<usize>> = doc.tokens.iter().map(|t| vocab.get(t)).collect();
    let mut pairs = Vec::new();
    for (t, center) in ids.iter().enumerate() {
        let Some(c) = *center else { continue };
        let lo = t.saturating_sub(window);
        let hi = (t + window).min(ids.len().saturating_sub(1));
        for (s, ctx) in ids.iter().enumerate().take(hi + 1).skip(lo) {
            if s == t {
                continue;
            }
            if let Some(o) = *ctx {
                pairs.push((c, o));
            }
        }
    }
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    FullSoftmax,
    NegativeSampling { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkipgramConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    /// Initial step size; decays linearly to a tenth of it over training.
    pub lr: f64,
    pub seed: u64,
    pub objective: Objective,
}

impl Default for SkipgramConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 5,
            epochs: 5,
            lr: 0.025,
            seed: 0,
            objective: Objective::NegativeSampling { k: 5 },
        }
    }
}

/// Mean per-pair loss of each epoch, measured before each update. For the
/// full softmax this is the negative log-likelihood.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    pub epoch_loss: Vec<f64>,
    pub pairs_per_epoch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    /// Row-major `|V| x dim`.
    central: Vec<f64>,
    context: Vec<f64>,
}

impl EmbeddingTable {
    /// Central vectors uniform in `[-0.5/d, 0.5/d]`, context vectors zero.
    pub fn init(vocab: &Vocabulary, dim: usize, seed_value: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        let half = 0.5 / dim as f64;
        let dist = Uniform::new_inclusive(-half, half);
        let mut rng = seed::rng(seed::derive(seed_value, "skipgram/init"));
        let n = vocab.len();
        let central = (0..n * dim).map(|_| dist.sample(&mut rng)).collect();
        Ok(Self::from_parts(
            vocab.tokens().to_vec(),
            dim,
            central,
            vec![0.0; n * dim],
        ))
    }

    fn from_parts(tokens: Vec<String>, dim: usize, central: Vec<f64>, context: Vec<f64>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            tokens,
            index,
            dim,
            central,
            context,
        }
    }

    /// Builds a table from explicit matrices (one row per token).
    pub fn from_rows(
        tokens: Vec<String>,
        central: Vec<Vec<f64>>,
        context: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let dim = central.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        for rows in [&central, &context] {
            if rows.len() != tokens.len() {
                return Err(Error::DimensionMismatch {
                    expected: tokens.len(),
                    got: rows.len(),
                });
            }
            if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: bad.len(),
                });
            }
            if rows.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("non-finite embedding value".into()));
            }
        }
        Ok(Self::from_parts(
            tokens,
            dim,
            central.concat(),
            context.concat(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn central(&self, i: usize) -> &[f64] {
        &self.central[i * self.dim..(i + 1) * self.dim]
    }

    pub fn context(&self, i: usize) -> &[f64] {
        &self.context[i * self.dim..(i + 1) * self.dim]
    }

    fn scores(&self, center: usize) -> Vec<f64> {
        let v = self.central(center);
        (0..self.len()).map(|i| dot(self.context(i), v)).collect()
    }

    /// `P(. | center)` under the full softmax.
    pub fn conditional_distribution(&self, center: usize) -> Vec<f64> {
        let scores = self.scores(center);
        let lse = log_sum_exp(&scores);
        scores.iter().map(|s| (s - lse).exp()).collect()
    }

    pub fn log_prob(&self, center: usize, context: usize) -> f64 {
        let scores = self.scores(center);
        scores[context] - log_sum_exp(&scores)
    }

    /// Gradient of `log P(context | center)` with respect to the center's
    /// central vector and to every context vector.
    pub fn log_prob_gradient(&self, center: usize, context: usize) -> PairGradient {
        let p = self.conditional_distribution(center);
        let v = self.central(center);
        let mut grad_central = self.context(context).to_vec();
        let mut grad_context = vec![0.0; self.context.len()];
        for (i, &pi) in p.iter().enumerate() {
            let u = self.context(i);
            for (g, &ui) in grad_central.iter_mut().zip(u) {
                *g -= pi * ui;
            }
            let coeff = if i == context { 1.0 - pi } else { -pi };
            for (g, &vj) in grad_context[i * self.dim..(i + 1) * self.dim]
                .iter_mut()
                .zip(v)
            {
                *g = coeff * vj;
            }
        }
        PairGradient {
            central: grad_central,
            context: grad_context,
        }
    }

    /// One ascent step on `log P(context | center)`; returns the pair's NLL
    /// before the step.
    fn softmax_step(&mut self, center: usize, context: usize, lr: f64) -> f64 {
        let scores = self.scores(center);
        let lse = log_sum_exp(&scores);
        let nll = lse - scores[context];
        let d = self.dim;
        let v: Vec<f64> = self.central(center).to_vec();
        let mut grad_v = self.context(context).to_vec();
        for (i, s) in scores.iter().enumerate() {
            let pi = (s - lse).exp();
            let coeff = if i == context { 1.0 - pi } else { -pi };
            let u = &mut self.context[i * d..(i + 1) * d];
            for j in 0..d {
                grad_v[j] -= pi * u[j];
                u[j] += lr * coeff * v[j];
            }
        }
        for (c, g) in self.central[center * d..(center + 1) * d]
            .iter_mut()
            .zip(&grad_v)
        {
            *c += lr * g;
        }
        nll
    }

    /// One step on the negative-sampling objective; returns its loss.
    fn negative_step(&mut self, center: usize, targets: &[(usize, f64)], lr: f64) -> f64 {
        let d = self.dim;
        let v: Vec<f64> = self.central(center).to_vec();
        let mut grad_v = vec![0.0; d];
        let mut loss = 0.0;
        for &(target, label) in targets {
            let u = &mut self.context[target * d..(target + 1) * d];
            let z = dot(u, &v);
            let sig = sigmoid(z);
            loss -= if label > 0.5 {
                log_sigmoid(z)
            } else {
                log_sigmoid(-z)
            };
            let g = label - sig;
            for j in 0..d {
                grad_v[j] += g * u[j];
                u[j] += lr * g * v[j];
            }
        }
        for (c, g) in self.central[center * d..(center + 1) * d]
            .iter_mut()
            .zip(&grad_v)
        {
            *c += lr * g;
        }
        loss
    }

    /// Cosine similarity of two central vectors.
    pub fn similarity(&self, a: usize, b: usize) -> f64 {
        cosine(self.central(a), self.central(b))
    }

    /// The most similar other token by cosine over central vectors. Ties go
    /// to the lower index.
    pub fn nearest(&self, token: &str) -> Option<&str> {
        let a = self.get(token)?;
        let mut best: Option<(usize, f64)> = None;
        for b in (0..self.len()).filter(|&b| b != a) {
            let s = self.similarity(a, b);
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((b, s));
            }
        }
        best.map(|(b, _)| self.tokens[b].as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    /// `d` entries for the center's central vector.
    pub central: Vec<f64>,
    /// `|V| x d` row-major entries for the context matrix.
    pub context: Vec<f64>,
}

pub fn train_skipgram(
    docs: &[TokenDoc],
    vocab: &Vocabulary,
    config: &SkipgramConfig,
) -> Result<(EmbeddingTable, TrainReport)> {
    if config.dim == 0 {
        return Err(Error::InvalidDimension);
    }
    if vocab.len() < 2 {
        return Err(Error::VocabularyTooSmall(vocab.len()));
    }
    if config.window == 0 {
        return Err(Error::InvalidConfig("window must be at least 1".into()));
    }
    if !(config.lr > 0.0) {
        return Err(Error::InvalidConfig(format!("lr must be > 0, got {}", config.lr)));
    }
    let mut pairs: Vec<(usize, usize)> = docs
        .iter()
        .flat_map(|d| extract_pairs(d, vocab, config.window))
        .collect();
    if pairs.is_empty() {
        return Err(Error::NoTrainingPairs);
    }
    let mut table = EmbeddingTable::init(vocab, config.dim, config.seed)?;
    let mut report = TrainReport {
        epoch_loss: Vec::with_capacity(config.epochs),
        pairs_per_epoch: pairs.len(),
    };

    let noise = match config.objective {
        Objective::NegativeSampling { k: 0 } => {
            return Err(Error::InvalidConfig("negative samples k must be >= 1".into()))
        }
        Objective::NegativeSampling { .. } => {
            let mut counts = vec![0.0f64; vocab.len()];
            for &(_, o) in &pairs {
                counts[o] += 1.0;
            }
            let weights: Vec<f64> = counts.iter().map(|c| c.powf(0.75)).collect();
            Some(WeightedIndex::new(&weights).map_err(|e| Error::InvalidConfig(e.to_string()))?)
        }
        Objective::FullSoftmax => None,
    };

    let total_steps = (config.epochs * pairs.len()) as f64;
    let mut step = 0usize;
    let mut targets: Vec<(usize, f64)> = Vec::new();
    for epoch in 0..config.epochs {
        let mut rng = seed::rng(seed::derive(config.seed, &format!("skipgram/epoch{epoch}")));
        pairs.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for &(c, o) in &pairs {
            let lr = config.lr * (1.0 - 0.9 * step as f64 / total_steps);
            step += 1;
            loss_sum += match (&config.objective, &noise) {
                (Objective::NegativeSampling { k }, Some(noise)) => {
                    targets.clear();
                    targets.push((o, 1.0));
                    for _ in 0..*k {
                        let n = noise.sample(&mut rng);
                        if n != o {
                            targets.push((n, 0.0));
                        }
                    }
                    table.negative_step(c, &targets, lr)
                }
                _ => table.softmax_step(c, o, lr),
            };
        }
        report.epoch_loss.push(loss_sum / pairs.len() as f64);
    }
    Ok((table, report))
}

/// Mean of the central vectors of in-vocabulary tokens, counted with
/// multiplicity. Zero when no token is known.
pub fn doc_embed(doc: &TokenDoc, table: &EmbeddingTable) -> DenseVector {
    let mut acc = vec![0.0; table.dim()];
    let mut n = 0usize;
    for t in &doc.tokens {
        if let Some(i) = table.get(t) {
            for (a, v) in acc.iter_mut().zip(table.central(i)) {
                *a += v;
            }
            n += 1;
        }
    }
    if n > 0 {
        let inv = 1.0 / n as f64;
        acc.iter_mut().for_each(|a| *a *= inv);
    }
    DenseVector::new(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingArtifact {
    pub version: u32,
    pub d: usize,
    pub tokens: Vec<String>,
    pub v_central: Vec<Vec<f64>>,
    pub u_context: Vec<Vec<f64>>,
}

impl EmbeddingArtifact {
    pub fn new(table: &EmbeddingTable) -> Self {
        let rows = |m: &[f64]| m.chunks(table.dim).map(<[f64]>::to_vec).collect();
        Self {
            version: VERSION,
            d: table.dim,
            tokens: table.tokens.clone(),
            v_central: rows(&table.central),
            u_context: rows(&table.context),
        }
    }

    pub fn into_table(self) -> Result<EmbeddingTable> {
        check_version("embedding", self.version)?;
        let table = EmbeddingTable::from_rows(self.tokens, self.v_central, self.u_context)?;
        if table.dim != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: table.dim,
            });
        }
        Ok(table)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let denom = dot(a, a).sqrt() * dot(b, b).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        dot(a, b) / denom
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}
