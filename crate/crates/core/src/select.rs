//! Univariate feature scoring and top-k selection.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::artifact::{check_version, scores, VERSION};
use crate::error::{Error, Result};
use crate::vector::FeatureRow;

/// Default number of kept features, capped by the input width.
pub const DEFAULT_K: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scorer {
    /// For nonnegative features (counts, TF-IDF weights).
    Chi2,
    /// One-way ANOVA F, for signed dense features.
    FClassif,
}

impl Scorer {
    pub fn score<R: FeatureRow>(self, x: &[R], y: &[bool]) -> Result<Vec<f64>> {
        match self {
            Scorer::Chi2 => score_chi2(x, y),
            Scorer::FClassif => score_f_classif(x, y),
        }
    }
}

fn check_inputs<R: FeatureRow>(x: &[R], y: &[bool], min_len: usize) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < min_len {
        return Err(Error::InvalidConfig(format!(
            "need at least {min_len} samples, got {}",
            x.len()
        )));
    }
    let n_pos = y.iter().filter(|&&p| p).count();
    if n_pos == 0 || n_pos == y.len() {
        return Err(Error::SingleClass);
    }
    let dim = x[0].dim();
    if let Some(bad) = x.iter().find(|r| r.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.dim(),
        });
    }
    Ok(dim)
}

/// Chi-square between per-class feature sums and the sums expected from the
/// class priors.
pub fn score_chi2<R: FeatureRow>(x: &[R], y: &[bool]) -> Result<Vec<f64>> {
    let dim = check_inputs(x, y, 2)?;
    let mut observed = [vec![0.0; dim], vec![0.0; dim]];
    for (row, &positive) in x.iter().zip(y) {
        if let Some((feature, value)) = row.min_value().filter(|&(_, v)| v < 0.0) {
            return Err(Error::NegativeFeature { feature, value });
        }
        let sums = &mut observed[usize::from(positive)];
        row.for_each_value(|i, v| sums[i] += v);
    }
    let n = y.len() as f64;
    let n_pos = y.iter().filter(|&&p| p).count() as f64;
    let priors = [(n - n_pos) / n, n_pos / n];
    Ok((0..dim)
        .map(|j| {
            let total = observed[0][j] + observed[1][j];
            (0..2)
                .map(|c| {
                    let expected = priors[c] * total;
                    if expected > 0.0 {
                        (observed[c][j] - expected).powi(2) / expected
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect())
}

/// ANOVA F: between-class mean square over within-class mean square. Zero
/// within-class spread gives `+inf` when the class means differ, else 0.
pub fn score_f_classif<R: FeatureRow>(x: &[R], y: &[bool]) -> Result<Vec<f64>> {
    let dim = check_inputs(x, y, 3)?;
    let mut sums = [vec![0.0; dim], vec![0.0; dim]];
    let mut stored = [vec![0usize; dim], vec![0usize; dim]];
    let mut counts = [0usize; 2];
    for (row, &positive) in x.iter().zip(y) {
        let c = usize::from(positive);
        counts[c] += 1;
        row.for_each_value(|i, v| {
            sums[c][i] += v;
            stored[c][i] += 1;
        });
    }
    let means: Vec<Vec<f64>> = (0..2)
        .map(|c| sums[c].iter().map(|s| s / counts[c] as f64).collect())
        .collect();
    // Second pass for the within-class sum of squares; values a sparse row
    // does not store are zeros.
    let mut within = vec![0.0; dim];
    for (row, &positive) in x.iter().zip(y) {
        let m = &means[usize::from(positive)];
        row.for_each_value(|i, v| within[i] += (v - m[i]).powi(2));
    }
    let n = y.len() as f64;
    Ok((0..dim)
        .map(|j| {
            for c in 0..2 {
                let implicit = (counts[c] - stored[c][j]) as f64;
                within[j] += implicit * means[c][j] * means[c][j];
            }
            let grand = (sums[0][j] + sums[1][j]) / n;
            let between: f64 = (0..2)
                .map(|c| counts[c] as f64 * (means[c][j] - grand).powi(2))
                .sum();
            let ms_between = between / 1.0;
            let ms_within = within[j] / (n - 2.0);
            if ms_within > 0.0 {
                ms_between / ms_within
            } else if ms_between > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect())
}

/// Descending score, then ascending index. NaN ranks last.
fn rank_order(scores: &[f64]) -> Vec<usize> {
    let key = |s: f64| if s.is_nan() { f64::NEG_INFINITY } else { s };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        key(scores[b])
            .partial_cmp(&key(scores[a]))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorModel {
    scores: Vec<f64>,
    kept_indices: Vec<usize>,
    input_dim: usize,
}

impl SelectorModel {
    /// Keeps the `k` best-scoring features. Ties favor the lower index.
    pub fn from_scores(scores: Vec<f64>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::KTooSmall { k, min: 1 });
        }
        if k > scores.len() {
            return Err(Error::KTooLarge {
                k,
                available: scores.len(),
            });
        }
        let mut kept_indices = rank_order(&scores);
        kept_indices.truncate(k);
        kept_indices.sort_unstable();
        Ok(Self {
            input_dim: scores.len(),
            scores,
            kept_indices,
        })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn kept_indices(&self) -> &[usize] {
        &self.kept_indices
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn k(&self) -> usize {
        self.kept_indices.len()
    }

    pub fn transform<R: FeatureRow>(&self, row: &R) -> Result<R> {
        if row.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: row.dim(),
            });
        }
        Ok(row.project(&self.kept_indices))
    }

    pub fn transform_all<R: FeatureRow>(&self, rows: &[R]) -> Result<Vec<R>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

/// Reduces `x` to its `k` highest-scoring columns. Columns keep their
/// original relative order.
pub fn select_k_best<R: FeatureRow>(
    x: &[R],
    scores: &[f64],
    k: usize,
) -> Result<(Vec<R>, SelectorModel)> {
    let model = SelectorModel::from_scores(scores.to_vec(), k)?;
    let reduced = model.transform_all(x)?;
    Ok((reduced, model))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorArtifact {
    pub version: u32,
    pub input_dim: usize,
    pub k: usize,
    pub kept_indices: Vec<usize>,
    #[serde(with = "scores")]
    pub scores: Vec<f64>,
}

impl SelectorArtifact {
    pub fn new(model: &SelectorModel) -> Self {
        Self {
            version: VERSION,
            input_dim: model.input_dim,
            k: model.k(),
            kept_indices: model.kept_indices.clone(),
            scores: model.scores.clone(),
        }
    }

    pub fn into_model(self) -> Result<SelectorModel> {
        check_version("selector", self.version)?;
        let valid = self.scores.len() == self.input_dim
            && self.kept_indices.len() == self.k
            && self.kept_indices.windows(2).all(|w| w[0] < w[1])
            && self.kept_indices.iter().all(|&i| i < self.input_dim);
        if !valid {
            return Err(Error::InvalidConfig("inconsistent selector artifact".into()));
        }
        Ok(SelectorModel {
            scores: self.scores,
            kept_indices: self.kept_indices,
            input_dim: self.input_dim,
        })
    }
}
