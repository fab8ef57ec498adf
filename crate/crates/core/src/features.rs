//! Vocabulary statistics with bag-of-words and TF-IDF vectorization.
//!
//! TF-IDF uses raw counts, the smoothed idf `ln((1 + N) / (1 + df)) + 1`
//! and L2 row normalization.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::artifact::{check_version, VERSION};
use crate::error::{Error, Result};
use crate::preprocess::TokenDoc;
pub use crate::vector::SparseVector;

/// Token to index map with document frequencies. Indices follow first
/// appearance in the fitting documents.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    fn from_parts(tokens: Vec<String>, doc_freq: Vec<usize>, n_docs: usize) -> Result<Self> {
        if tokens.len() != doc_freq.len() {
            return Err(Error::LengthMismatch {
                left: tokens.len(),
                right: doc_freq.len(),
            });
        }
        let index: HashMap<String, usize> = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        if index.len() != tokens.len() {
            return Err(Error::InvalidConfig("duplicate token in vocabulary".into()));
        }
        Ok(Self {
            tokens,
            index,
            doc_freq,
            n_docs,
        })
    }

    /// Per-index counts of in-vocabulary tokens.
    fn counts(&self, doc: &TokenDoc) -> Vec<(usize, f64)> {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for t in &doc.tokens {
            if let Some(i) = self.get(t) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        counts.into_iter().collect()
    }
}

/// Keeps tokens that occur in at least `min_df` documents.
pub fn build_vocab(docs: &[TokenDoc], min_df: usize) -> Result<Vocabulary> {
    let min_df = min_df.max(1);
    let mut order: Vec<&str> = Vec::new();
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in docs {
        let mut seen_here: Vec<&str> = doc.tokens.iter().map(String::as_str).collect();
        // First-seen order across the corpus.
        for &t in &seen_here {
            if !df.contains_key(t) {
                df.insert(t, 0);
                order.push(t);
            }
        }
        seen_here.sort_unstable();
        seen_here.dedup();
        for t in seen_here {
            *df.get_mut(t).expect("inserted above") += 1;
        }
    }
    let (tokens, doc_freq): (Vec<String>, Vec<usize>) = order
        .into_iter()
        .filter(|t| df[t] >= min_df)
        .map(|t| (t.to_string(), df[t]))
        .unzip();
    if tokens.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Vocabulary::from_parts(tokens, doc_freq, docs.len())
}

pub fn bow_vectorize(doc: &TokenDoc, vocab: &Vocabulary) -> SparseVector {
    SparseVector::from_entries(vocab.len(), vocab.counts(doc))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    idf: Vec<f64>,
    n_docs: usize,
}

impl IdfTable {
    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }
}

/// Smoothed idf from the vocabulary's document frequencies. `docs` only
/// contributes its length, which must match the vocabulary fit.
pub fn tfidf_fit(docs: &[TokenDoc], vocab: &Vocabulary) -> Result<IdfTable> {
    if docs.len() != vocab.n_docs() {
        return Err(Error::LengthMismatch {
            left: docs.len(),
            right: vocab.n_docs(),
        });
    }
    Ok(idf_from_vocab(vocab))
}

pub(crate) fn idf_from_vocab(vocab: &Vocabulary) -> IdfTable {
    let n = vocab.n_docs() as f64;
    IdfTable {
        idf: vocab
            .doc_freq()
            .iter()
            .map(|&df| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)
            .collect(),
        n_docs: vocab.n_docs(),
    }
}

/// Counts times idf, L2-normalized. Documents with no in-vocabulary token
/// map to the zero vector.
pub fn tfidf_transform(doc: &TokenDoc, vocab: &Vocabulary, idf: &IdfTable) -> SparseVector {
    let weighted = vocab
        .counts(doc)
        .into_iter()
        .map(|(i, c)| (i, c * idf.idf[i]))
        .collect();
    let mut v = SparseVector::from_entries(vocab.len(), weighted);
    let norm = v.norm();
    if norm > 0.0 {
        v.scale_in_place(1.0 / norm);
    }
    v
}

/// Serialized form of a fitted vocabulary, with idf when TF-IDF was fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabArtifact {
    pub version: u32,
    pub tokens: Vec<String>,
    pub doc_freq: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idf: Option<Vec<f64>>,
    pub n_docs: usize,
}

impl VocabArtifact {
    pub fn new(vocab: &Vocabulary, idf: Option<&IdfTable>) -> Self {
        Self {
            version: VERSION,
            tokens: vocab.tokens.clone(),
            doc_freq: vocab.doc_freq.clone(),
            idf: idf.map(|t| t.idf.clone()),
            n_docs: vocab.n_docs,
        }
    }

    pub fn into_parts(self) -> Result<(Vocabulary, Option<IdfTable>)> {
        check_version("vocabulary", self.version)?;
        let vocab = Vocabulary::from_parts(self.tokens, self.doc_freq, self.n_docs)?;
        let idf = match self.idf {
            Some(idf) if idf.len() != vocab.len() => {
                return Err(Error::DimensionMismatch {
                    expected: vocab.len(),
                    got: idf.len(),
                })
            }
            Some(idf) => Some(IdfTable {
                idf,
                n_docs: self.n_docs,
            }),
            None => None,
        };
        Ok((vocab, idf))
    }
}
