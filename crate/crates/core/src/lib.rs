//! Clinical-note classification: preprocessing, sparse and embedded document
//! representations, univariate feature selection, three binary classifiers
//! and a cross-validated experiment grid.
//!
//! Every stochastic component takes an explicit `u64` seed; see [`seed`].

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifact;
pub mod classifiers;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod features;
pub mod pipeline;
pub mod preprocess;
pub mod seed;
pub mod select;
pub mod synth;
pub mod vector;

pub use error::{Error, Result};
