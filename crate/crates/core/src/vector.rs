//! Document feature vectors.
//!
//! [`SparseVector`] carries BoW and TF-IDF rows, [`DenseVector`] carries
//! document embeddings. Classifiers and selectors are written against
//! [`FeatureRow`] so they accept either.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    /// `(index, value)` sorted by strictly increasing index, no zeros.
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds a vector from unordered entries. Duplicate indices are summed and
    /// zero results are dropped.
    ///
    /// # Panics
    /// Panics if an index is `>= dim`.
    pub fn from_entries(dim: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            assert!(i < dim, "index {i} out of bounds for dim {dim}");
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        Self {
            dim,
            entries: merged,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DenseVector {
        let mut values = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            values[i] = v;
        }
        DenseVector::new(values)
    }

    pub(crate) fn scale_in_place(&mut self, factor: f64) {
        for (_, v) in &mut self.entries {
            *v *= factor;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector {
    values: Vec<f64>,
}

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// A single document's features, sparse or dense.
pub trait FeatureRow: Clone {
    fn dim(&self) -> usize;

    /// Calls `f(index, value)` for every stored value in increasing index
    /// order. Dense rows visit every index, including zeros.
    fn for_each_value(&self, f: impl FnMut(usize, f64));

    fn dot(&self, weights: &[f64]) -> f64 {
        let mut acc = 0.0;
        self.for_each_value(|i, v| acc += v * weights[i]);
        acc
    }

    /// Keeps only `kept` (sorted original indices) and re-indexes them densely.
    fn project(&self, kept: &[usize]) -> Self;

    /// Smallest stored value, or `None` for an empty sparse row.
    fn min_value(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        self.for_each_value(|i, v| {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        });
        best
    }
}

impl FeatureRow for SparseVector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn for_each_value(&self, mut f: impl FnMut(usize, f64)) {
        for &(i, v) in &self.entries {
            f(i, v);
        }
    }

    fn project(&self, kept: &[usize]) -> Self {
        // Both lists are sorted; merge-walk them.
        let mut entries = Vec::new();
        let mut pos = 0;
        for &(i, v) in &self.entries {
            while pos < kept.len() && kept[pos] < i {
                pos += 1;
            }
            if pos == kept.len() {
                break;
            }
            if kept[pos] == i {
                entries.push((pos, v));
            }
        }
        SparseVector {
            dim: kept.len(),
            entries,
        }
    }
}

impl FeatureRow for DenseVector {
    fn dim(&self) -> usize {
        self.values.len()
    }

    fn for_each_value(&self, mut f: impl FnMut(usize, f64)) {
        for (i, &v) in self.values.iter().enumerate() {
            f(i, v);
        }
    }

    fn dot(&self, weights: &[f64]) -> f64 {
        self.values.iter().zip(weights).map(|(a, b)| a * b).sum()
    }

    fn project(&self, kept: &[usize]) -> Self {
        DenseVector::new(kept.iter().map(|&i| self.values[i]).collect())
    }
}
