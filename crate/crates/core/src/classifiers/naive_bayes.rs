use serde::{Deserialize, Serialize};

use super::{check_dim, check_training_set, finite, sigmoid};
use crate::error::{Error, Result};
use crate::vector::FeatureRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GnbConfig {
    /// Fraction of the largest feature variance added to every variance.
    pub var_smoothing: f64,
}

impl Default for GnbConfig {
    fn default() -> Self {
        Self { var_smoothing: 1e-9 }
    }
}

/// Gaussian naive Bayes over two classes; index 0 is Negative, 1 Positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    priors: [f64; 2],
    means: [Vec<f64>; 2],
    variances: [Vec<f64>; 2],
}

impl GaussianNb {
    pub fn fit<R: FeatureRow>(x: &[R], y: &[bool], config: &GnbConfig) -> Result<Self> {
        if !(config.var_smoothing > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "var_smoothing must be > 0, got {}",
                config.var_smoothing
            )));
        }
        let dim = check_training_set(x, y)?;
        let mut counts = [0usize; 2];
        let mut sums = [vec![0.0; dim], vec![0.0; dim]];
        for (row, &t) in x.iter().zip(y) {
            let c = usize::from(t);
            counts[c] += 1;
            row.for_each_value(|i, v| sums[c][i] += v);
        }
        let means: [Vec<f64>; 2] =
            [0, 1].map(|c| sums[c].iter().map(|s| s / counts[c] as f64).collect());

        // Rows are densified one at a time for the squared deviations.
        let mut sq = [vec![0.0; dim], vec![0.0; dim]];
        let mut dense = vec![0.0; dim];
        for (row, &t) in x.iter().zip(y) {
            let c = usize::from(t);
            dense.iter_mut().for_each(|d| *d = 0.0);
            row.for_each_value(|i, v| dense[i] = v);
            for ((acc, &v), &m) in sq[c].iter_mut().zip(&dense).zip(&means[c]) {
                *acc += (v - m) * (v - m);
            }
        }

        // Smoothing is relative to the largest pooled variance.
        let n = x.len() as f64;
        let max_var = (0..dim)
            .map(|j| {
                let grand = (sums[0][j] + sums[1][j]) / n;
                let between: f64 = (0..2)
                    .map(|c| counts[c] as f64 * (means[c][j] - grand).powi(2))
                    .sum();
                (sq[0][j] + sq[1][j] + between) / n
            })
            .fold(0.0, f64::max);
        let epsilon = if max_var > 0.0 {
            config.var_smoothing * max_var
        } else {
            config.var_smoothing
        };
        let variances = [0, 1].map(|c| {
            sq[c]
                .iter()
                .map(|s| s / counts[c] as f64 + epsilon)
                .collect()
        });
        Ok(Self {
            priors: [counts[0] as f64 / n, counts[1] as f64 / n],
            means,
            variances,
        })
    }

    pub fn priors(&self) -> [f64; 2] {
        self.priors
    }

    pub fn means(&self, positive: bool) -> &[f64] {
        &self.means[usize::from(positive)]
    }

    pub fn variances(&self, positive: bool) -> &[f64] {
        &self.variances[usize::from(positive)]
    }

    pub fn input_dim(&self) -> usize {
        self.means[0].len()
    }

    /// `ln P(y) + Σ_i ln N(x_i; μ_y, σ²_y)` for `[Negative, Positive]`.
    pub fn log_joint<R: FeatureRow>(&self, x: &R) -> Result<[f64; 2]> {
        check_dim(self.input_dim(), x)?;
        let mut dense = vec![0.0; self.input_dim()];
        x.for_each_value(|i, v| dense[i] = v);
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        Ok([0, 1].map(|c| {
            let ll: f64 = dense
                .iter()
                .zip(&self.means[c])
                .zip(&self.variances[c])
                .map(|((&v, &m), &var)| -0.5 * (ln_2pi + var.ln()) - (v - m) * (v - m) / (2.0 * var))
                .sum();
            self.priors[c].ln() + ll
        }))
    }

    /// Normalized posteriors `[P(Negative | x), P(Positive | x)]`.
    pub fn posteriors<R: FeatureRow>(&self, x: &R) -> Result<[f64; 2]> {
        // Two-class log-sum-exp normalization reduces to a logistic of the
        // log-joint difference; exact 0.5 on ties.
        let [a, b] = self.log_joint(x)?;
        Ok([sigmoid(a - b), sigmoid(b - a)])
    }

    pub fn predict_proba<R: FeatureRow>(&self, x: &R) -> Result<f64> {
        Ok(self.posteriors(x)?[1])
    }

    pub(super) fn validate(&self) -> Result<()> {
        let dim = self.input_dim();
        let consistent = self.means[1].len() == dim
            && self.variances.iter().all(|v| v.len() == dim)
            && self.variances.iter().flatten().all(|&v| v > 0.0)
            && self.priors.iter().all(|&p| p > 0.0)
            && (self.priors[0] + self.priors[1] - 1.0).abs() < 1e-9;
        if !consistent {
            return Err(Error::InvalidConfig("inconsistent naive Bayes artifact".into()));
        }
        for c in 0..2 {
            finite(&self.means[c], "naive Bayes means")?;
            finite(&self.variances[c], "naive Bayes variances")?;
        }
        Ok(())
    }
}
