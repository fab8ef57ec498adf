use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("duplicate note id {0:?}")]
    DuplicateId(String),

    #[error("need at least 2 distinct patient ids and 2 distinct provider ids")]
    InsufficientGroups,

    #[error("patient/provider links leave a single connected group; cannot split")]
    UnsatisfiableSplit,

    #[error("contamination: {key} {value:?} appears in both train and test")]
    Contamination { key: &'static str, value: String },

    #[error("no token reaches the minimum document frequency")]
    EmptyVocabulary,

    #[error("embedding dimension must be at least 1")]
    InvalidDimension,

    #[error("corpus yields no (center, context) pairs")]
    NoTrainingPairs,

    #[error("vocabulary must contain at least 2 tokens, got {0}")]
    VocabularyTooSmall(usize),

    #[error("negative feature value {value} at feature {feature}; chi-square needs counts or weights >= 0")]
    NegativeFeature { feature: usize, value: f64 },

    #[error("only one class present in the labels")]
    SingleClass,

    #[error("k = {k} exceeds the available {available}")]
    KTooLarge { k: usize, available: usize },

    #[error("k must be at least {min}, got {k}")]
    KTooSmall { k: usize, min: usize },

    #[error("class with {count} samples cannot fill {k} folds")]
    ClassTooSmall { count: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unlabeled note {0:?} cannot be used for training or evaluation")]
    Unlabeled(String),

    #[error("{artifact} artifact version {found} is not supported (expected {expected})")]
    VersionMismatch {
        artifact: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the environment (files, paths) rather than by
    /// the data or configuration.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
