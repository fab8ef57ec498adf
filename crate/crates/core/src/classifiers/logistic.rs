use serde::{Deserialize, Serialize};

use super::{bce_with_logit, check_dim, check_training_set, finite, sigmoid};
use crate::error::{Error, Result};
use crate::vector::FeatureRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticConfig {
    pub l2: f64,
    pub lr: f64,
    pub epochs: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            lr: 1.0,
            epochs: 500,
        }
    }
}

/// `P(y = 1 | x) = 1 / (1 + exp(-(w·x + b)))`, trained by full-batch gradient
/// descent on the L2-regularized mean cross-entropy. The bias is not
/// regularized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    weights: Vec<f64>,
    bias: f64,
    l2: f64,
}

impl LogisticRegression {
    pub fn new(weights: Vec<f64>, bias: f64, l2: f64) -> Self {
        Self { weights, bias, l2 }
    }

    pub fn zeros(dim: usize, l2: f64) -> Self {
        Self::new(vec![0.0; dim], 0.0, l2)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn decision<R: FeatureRow>(&self, x: &R) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    pub fn predict_proba<R: FeatureRow>(&self, x: &R) -> Result<f64> {
        check_dim(self.weights.len(), x)?;
        Ok(sigmoid(self.decision(x)))
    }

    /// Regularized mean negative log-likelihood on `(x, y)`.
    pub fn loss<R: FeatureRow>(&self, x: &[R], y: &[bool]) -> f64 {
        let data: f64 = x
            .iter()
            .zip(y)
            .map(|(row, &t)| bce_with_logit(self.decision(row), t))
            .sum::<f64>()
            / x.len() as f64;
        data + 0.5 * self.l2 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Gradient of [`loss`](Self::loss) as `(d/dw, d/db)`.
    pub fn gradient<R: FeatureRow>(&self, x: &[R], y: &[bool]) -> (Vec<f64>, f64) {
        let n = x.len() as f64;
        let mut gw = vec![0.0; self.weights.len()];
        let mut gb = 0.0;
        for (row, &t) in x.iter().zip(y) {
            let residual = sigmoid(self.decision(row)) - f64::from(u8::from(t));
            row.for_each_value(|i, v| gw[i] += residual * v);
            gb += residual;
        }
        for (g, w) in gw.iter_mut().zip(&self.weights) {
            *g = *g / n + self.l2 * w;
        }
        (gw, gb / n)
    }

    pub fn fit<R: FeatureRow>(x: &[R], y: &[bool], config: &LogisticConfig) -> Result<Self> {
        Self::fit_with_history(x, y, config).map(|(m, _)| m)
    }

    /// Like [`fit`](Self::fit), also returning the loss before each epoch and
    /// after the last one.
    pub fn fit_with_history<R: FeatureRow>(
        x: &[R],
        y: &[bool],
        config: &LogisticConfig,
    ) -> Result<(Self, Vec<f64>)> {
        if !(config.lr > 0.0) || !(config.l2 >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "logistic regression needs lr > 0 and l2 >= 0, got lr={} l2={}",
                config.lr, config.l2
            )));
        }
        let dim = check_training_set(x, y)?;
        let mut model = Self::zeros(dim, config.l2);
        let mut history = Vec::with_capacity(config.epochs + 1);
        for _ in 0..config.epochs {
            history.push(model.loss(x, y));
            let (gw, gb) = model.gradient(x, y);
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w -= config.lr * g;
            }
            model.bias -= config.lr * gb;
        }
        history.push(model.loss(x, y));
        Ok((model, history))
    }

    pub(super) fn validate(&self) -> Result<()> {
        finite(&self.weights, "logistic weights")?;
        finite(&[self.bias, self.l2], "logistic bias")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::{DenseVector, SparseVector};

    fn rows(v: &[&[f64]]) -> Vec<DenseVector> {
        v.iter().map(|r| DenseVector::new(r.to_vec())).collect()
    }

    #[test]
    fn zero_model_is_indifferent() {
        let m = LogisticRegression::zeros(3, 0.0);
        assert_eq!(m.predict_proba(&DenseVector::new(vec![4.0, -2.0, 9.0])).unwrap(), 0.5);
        let m = LogisticRegression::new(vec![1.0], 0.0, 0.0);
        assert_eq!(m.predict_proba(&DenseVector::new(vec![0.0])).unwrap(), 0.5);
    }

    #[test]
    fn scalar_probability() {
        let m = LogisticRegression::new(vec![2.0], -1.0, 0.0);
        let p = m.predict_proba(&DenseVector::new(vec![1.0])).unwrap();
        // 1 / (1 + e^-1)
        assert!((p - 0.731_058_578_630_004_9).abs() < 1e-15);
    }

    #[test]
    fn separable_line_is_learned() {
        let x = rows(&[&[-1.0], &[1.0]]);
        let y = [false, true];
        let cfg = LogisticConfig {
            l2: 0.0,
            ..Default::default()
        };
        let m = LogisticRegression::fit(&x, &y, &cfg).unwrap();
        assert!(m.predict_proba(&x[0]).unwrap() < 0.5);
        assert!(m.predict_proba(&x[1]).unwrap() > 0.5);
    }

    #[test]
    fn single_class_rejected() {
        let x = rows(&[&[1.0], &[2.0]]);
        assert!(matches!(
            LogisticRegression::fit(&x, &[true, true], &LogisticConfig::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn loss_is_monotone_with_small_steps() {
        let x: Vec<SparseVector> = (0..12)
            .map(|i| {
                let a = (i as f64 * 0.7).sin().abs() + 0.1;
                let b = (i as f64 * 1.3).cos().abs() + 0.1;
                let n = (a * a + b * b).sqrt();
                SparseVector::from_entries(3, vec![(i % 3, a / n), ((i + 1) % 3, b / n)])
            })
            .collect();
        let y: Vec<bool> = (0..12).map(|i| i % 3 == 0 || i == 5).collect();
        let cfg = LogisticConfig {
            l2: 1e-4,
            lr: 1e-2,
            epochs: 300,
        };
        let (_, history) = LogisticRegression::fit_with_history(&x, &y, &cfg).unwrap();
        assert!(history.windows(2).all(|w| w[1] <= w[0]));
        assert!(history.last() < history.first());
    }
}
