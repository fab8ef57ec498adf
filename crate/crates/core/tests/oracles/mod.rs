//! Brute-force reference computations, written independently of the library
//! internals. Shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

/// TF-IDF of `doc` against `corpus`, keyed by token: raw counts times
/// `ln((1 + N) / (1 + df)) + 1`, then divided by the Euclidean norm.
pub fn tfidf(corpus: &[Vec<String>], doc: &[String]) -> BTreeMap<String, f64> {
    let n = corpus.len() as f64;
    let known: HashSet<&String> = corpus.iter().flatten().collect();
    let mut weights = BTreeMap::new();
    for token in doc.iter().filter(|t| known.contains(t)) {
        if weights.contains_key(token) {
            continue;
        }
        let count = doc.iter().filter(|t| *t == token).count() as f64;
        let df = corpus.iter().filter(|d| d.contains(token)).count() as f64;
        weights.insert(token.clone(), count * (((1.0 + n) / (1.0 + df)).ln() + 1.0));
    }
    let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for w in weights.values_mut() {
            *w /= norm;
        }
    }
    weights
}

/// Central finite differences of `f` at `x`.
pub fn numeric_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + step;
            let up = f(&probe);
            probe[i] = x[i] - step;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Largest `|a - n| / max(|a|, |n|, 1e-6)` over components.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
        .fold(0.0, f64::max)
}

/// Indices of the `k` largest scores, ties toward the lower index, returned
/// ascending.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Bubble sort keeps this obviously correct rather than fast.
    for i in 0..order.len() {
        for j in 0..order.len() - 1 - i {
            let (a, b) = (order[j], order[j + 1]);
            let a_first = scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
            if !a_first {
                order.swap(j, j + 1);
            }
        }
    }
    let mut kept = order[..k].to_vec();
    kept.sort_unstable();
    kept
}

/// `(tp, fp, fn, tn)` by explicit counting.
pub fn confusion(truth: &[bool], pred: &[bool]) -> (usize, usize, usize, usize) {
    let count = |t: bool, p: bool| truth.iter().zip(pred).filter(|(&a, &b)| a == t && b == p).count();
    (count(true, true), count(false, true), count(true, false), count(false, false))
}

/// `(acc, pre, rec, f1)` with 0 for any zero denominator.
pub fn rates(truth: &[bool], pred: &[bool]) -> (f64, f64, f64, f64) {
    let (tp, fp, fn_, tn) = confusion(truth, pred);
    let div = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let pre = div(tp, tp + fp);
    let rec = div(tp, tp + fn_);
    let f1 = if pre + rec == 0.0 { 0.0 } else { 2.0 * pre * rec / (pre + rec) };
    (div(tp + tn, truth.len()), pre, rec, f1)
}

/// Two equal-prior one-dimensional Gaussians with means -1 and +1 and common
/// variance `var`: `P(+ | x) = 1 / (1 + exp(-2x / var))`.
pub fn symmetric_gaussian_posterior(x: f64, var: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * x / var).exp())
}
