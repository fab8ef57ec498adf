//! A fitted text-to-probability chain: preprocessing, one representation, an
//! optional selector and a classifier. Shared by the grid and the CLI.

use serde::{Deserialize, Serialize};

use crate::artifact::{check_version, VERSION};
use crate::classifiers::{Classifier, ClassifierKind, ClassifierParams, ModelArtifact};
use crate::corpus::{Label, Note};
use crate::embeddings::{doc_embed, train_skipgram, EmbeddingArtifact, EmbeddingTable, SkipgramConfig};
use crate::error::{Error, Result};
use crate::features::{
    bow_vectorize, build_vocab, tfidf_fit, tfidf_transform, IdfTable, VocabArtifact, Vocabulary,
};
use crate::preprocess::{PreprocessOptions, Preprocessor, Stoplist, TokenDoc};
use crate::select::{Scorer, SelectorArtifact, SelectorModel};
use crate::vector::{DenseVector, FeatureRow, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Bow,
    Tfidf,
    #[serde(rename = "embed")]
    Embeddings,
}

impl Representation {
    pub const ALL: [Representation; 3] = [
        Representation::Bow,
        Representation::Tfidf,
        Representation::Embeddings,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            Representation::Bow => "BoW",
            Representation::Tfidf => "TF-IDF",
            Representation::Embeddings => "Embeddings",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Representation::Bow => "bow",
            Representation::Tfidf => "tfidf",
            Representation::Embeddings => "embed",
        }
    }

    /// chi² needs non-negative features, so only the count-based
    /// representations use it.
    pub fn scorer(self) -> Scorer {
        match self {
            Representation::Bow | Representation::Tfidf => Scorer::Chi2,
            Representation::Embeddings => Scorer::FClassif,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepresentationConfig {
    pub min_df: usize,
    pub skipgram: SkipgramConfig,
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        Self {
            min_df: 1,
            skipgram: SkipgramConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedRepresentation {
    Bow(Vocabulary),
    Tfidf(Vocabulary, IdfTable),
    Embeddings(EmbeddingTable),
}

/// Document features in the representation's natural storage.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMatrix {
    Sparse(Vec<SparseVector>),
    Dense(Vec<DenseVector>),
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        match self {
            FeatureMatrix::Sparse(rows) => rows.len(),
            FeatureMatrix::Dense(rows) => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FittedRepresentation {
    /// Fits on `docs` only. `seed` drives the embedding training.
    pub fn fit(
        docs: &[TokenDoc],
        representation: Representation,
        config: &RepresentationConfig,
        seed: u64,
    ) -> Result<Self> {
        let vocab = build_vocab(docs, config.min_df)?;
        Ok(match representation {
            Representation::Bow => FittedRepresentation::Bow(vocab),
            Representation::Tfidf => {
                let idf = tfidf_fit(docs, &vocab)?;
                FittedRepresentation::Tfidf(vocab, idf)
            }
            Representation::Embeddings => {
                let cfg = SkipgramConfig {
                    seed,
                    ..config.skipgram
                };
                let (table, _) = train_skipgram(docs, &vocab, &cfg)?;
                FittedRepresentation::Embeddings(table)
            }
        })
    }

    pub fn kind(&self) -> Representation {
        match self {
            FittedRepresentation::Bow(_) => Representation::Bow,
            FittedRepresentation::Tfidf(..) => Representation::Tfidf,
            FittedRepresentation::Embeddings(_) => Representation::Embeddings,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FittedRepresentation::Bow(v) | FittedRepresentation::Tfidf(v, _) => v.len(),
            FittedRepresentation::Embeddings(t) => t.dim(),
        }
    }

    pub fn transform(&self, docs: &[TokenDoc]) -> FeatureMatrix {
        match self {
            FittedRepresentation::Bow(v) => {
                FeatureMatrix::Sparse(docs.iter().map(|d| bow_vectorize(d, v)).collect())
            }
            FittedRepresentation::Tfidf(v, idf) => {
                FeatureMatrix::Sparse(docs.iter().map(|d| tfidf_transform(d, v, idf)).collect())
            }
            FittedRepresentation::Embeddings(t) => {
                FeatureMatrix::Dense(docs.iter().map(|d| doc_embed(d, t)).collect())
            }
        }
    }
}

/// Selector plus classifier fitted on one feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Head {
    pub selector: Option<SelectorModel>,
    pub model: Classifier,
}

impl Head {
    /// `k = None` skips selection.
    pub fn fit(
        x: &FeatureMatrix,
        y: &[bool],
        scorer: Scorer,
        k: Option<usize>,
        kind: ClassifierKind,
        params: &ClassifierParams,
        seed: u64,
    ) -> Result<Self> {
        match x {
            FeatureMatrix::Sparse(rows) => Self::fit_rows(rows, y, scorer, k, kind, params, seed),
            FeatureMatrix::Dense(rows) => Self::fit_rows(rows, y, scorer, k, kind, params, seed),
        }
    }

    fn fit_rows<R: FeatureRow>(
        x: &[R],
        y: &[bool],
        scorer: Scorer,
        k: Option<usize>,
        kind: ClassifierKind,
        params: &ClassifierParams,
        seed: u64,
    ) -> Result<Self> {
        match k {
            None => Ok(Self {
                selector: None,
                model: Classifier::fit(kind, params, x, y, seed)?,
            }),
            Some(k) => {
                let selector = SelectorModel::from_scores(scorer.score(x, y)?, k)?;
                let reduced = selector.transform_all(x)?;
                let model = Classifier::fit(kind, params, &reduced, y, seed)?;
                Ok(Self {
                    selector: Some(selector),
                    model,
                })
            }
        }
    }

    /// `P(Positive)` for every row.
    pub fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        match x {
            FeatureMatrix::Sparse(rows) => self.proba_rows(rows),
            FeatureMatrix::Dense(rows) => self.proba_rows(rows),
        }
    }

    fn proba_rows<R: FeatureRow>(&self, rows: &[R]) -> Result<Vec<f64>> {
        rows.iter()
            .map(|r| match &self.selector {
                Some(s) => self.model.predict_proba(&s.transform(r)?),
                None => self.model.predict_proba(r),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub representation: Representation,
    pub classifier: ClassifierKind,
    pub features: RepresentationConfig,
    pub params: ClassifierParams,
    /// `None` keeps every feature.
    pub select_k: Option<usize>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            representation: Representation::Tfidf,
            classifier: ClassifierKind::Lr,
            features: RepresentationConfig::default(),
            params: ClassifierParams::default(),
            select_k: None,
            seed: 0,
        }
    }
}

/// Training labels of `docs`; every document must carry one.
pub fn labels_of(docs: &[TokenDoc]) -> Result<Vec<bool>> {
    docs.iter()
        .map(|d| d.label.as_bool().ok_or_else(|| Error::Unlabeled(d.note_id.clone())))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub preprocessor: Preprocessor,
    pub representation: FittedRepresentation,
    pub head: Head,
}

impl Pipeline {
    pub fn fit(notes: &[Note], preprocessor: Preprocessor, config: &PipelineConfig) -> Result<Self> {
        let docs = preprocessor.process_all(notes);
        let y = labels_of(&docs)?;
        let representation = FittedRepresentation::fit(
            &docs,
            config.representation,
            &config.features,
            crate::seed::derive(config.seed, "pipeline/representation"),
        )?;
        let x = representation.transform(&docs);
        let head = Head::fit(
            &x,
            &y,
            config.representation.scorer(),
            config.select_k,
            config.classifier,
            &config.params,
            crate::seed::derive(config.seed, "pipeline/classifier"),
        )?;
        Ok(Self {
            preprocessor,
            representation,
            head,
        })
    }

    pub fn predict_proba(&self, notes: &[Note]) -> Result<Vec<f64>> {
        let docs = self.preprocessor.process_all(notes);
        self.head.predict_proba(&self.representation.transform(&docs))
    }

    pub fn predict(&self, notes: &[Note], threshold: f64) -> Result<Vec<(f64, Label)>> {
        Ok(self
            .predict_proba(notes)?
            .into_iter()
            .map(|p| (p, crate::classifiers::label_for(p, threshold)))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessArtifact {
    #[serde(flatten)]
    pub options: PreprocessOptions,
    /// Normalized, sorted.
    pub stopwords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepresentationArtifact {
    Bow(VocabArtifact),
    Tfidf(VocabArtifact),
    #[serde(rename = "embed")]
    Embeddings(EmbeddingArtifact),
}

/// Serialized [`Pipeline`]; each component keeps its own versioned schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineArtifact {
    pub version: u32,
    pub preprocess: PreprocessArtifact,
    pub representation: RepresentationArtifact,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selector: Option<SelectorArtifact>,
    pub model: ModelArtifact,
}

impl PipelineArtifact {
    pub fn new(pipeline: &Pipeline) -> Self {
        let representation = match &pipeline.representation {
            FittedRepresentation::Bow(v) => RepresentationArtifact::Bow(VocabArtifact::new(v, None)),
            FittedRepresentation::Tfidf(v, idf) => {
                RepresentationArtifact::Tfidf(VocabArtifact::new(v, Some(idf)))
            }
            FittedRepresentation::Embeddings(t) => {
                RepresentationArtifact::Embeddings(EmbeddingArtifact::new(t))
            }
        };
        Self {
            version: VERSION,
            preprocess: PreprocessArtifact {
                options: pipeline.preprocessor.options(),
                stopwords: pipeline.preprocessor.stoplist().sorted_words(),
            },
            representation,
            selector: pipeline.head.selector.as_ref().map(SelectorArtifact::new),
            model: ModelArtifact::new(pipeline.head.model.clone()),
        }
    }

    pub fn into_pipeline(self) -> Result<Pipeline> {
        check_version("pipeline", self.version)?;
        let representation = match self.representation {
            RepresentationArtifact::Bow(a) => FittedRepresentation::Bow(a.into_parts()?.0),
            RepresentationArtifact::Tfidf(a) => match a.into_parts()? {
                (v, Some(idf)) => FittedRepresentation::Tfidf(v, idf),
                (_, None) => {
                    return Err(Error::InvalidConfig("tf-idf artifact without idf".into()));
                }
            },
            RepresentationArtifact::Embeddings(a) => FittedRepresentation::Embeddings(a.into_table()?),
        };
        let selector = self.selector.map(SelectorArtifact::into_model).transpose()?;
        let model = self.model.into_model()?;
        let width = selector.as_ref().map_or(representation.dim(), SelectorModel::k);
        if let Some(s) = &selector {
            if s.input_dim() != representation.dim() {
                return Err(Error::DimensionMismatch {
                    expected: representation.dim(),
                    got: s.input_dim(),
                });
            }
        }
        if model.input_dim() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: model.input_dim(),
            });
        }
        // Stopwords are stored post-normalization, so re-normalizing is a no-op.
        let preprocessor = Preprocessor::new(
            self.preprocess.options,
            Stoplist::new(self.preprocess.stopwords),
        );
        Ok(Pipeline {
            preprocessor,
            representation,
            head: Head { selector, model },
        })
    }
}
