//! Flag definitions. Every flag is optional at parse time so a `--config`
//! file can supply it; defaults are applied only after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use clinote::classifiers::ClassifierKind;
use clinote::pipeline::Representation;

#[derive(Debug, Parser)]
#[command(name = "clinote", version, about = "Clinical-note classification pipeline")]
pub struct Cli {
    /// JSON object whose keys are this subcommand's long flag names.
    /// Command-line flags take precedence over it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic corpus.
    Synth(SynthArgs),
    /// Tokenize notes into a token-document JSONL file.
    Preprocess(PreprocessArgs),
    /// Fit one representation + classifier pipeline and save it.
    Fit(FitArgs),
    /// Score notes with a saved pipeline.
    Predict(PredictArgs),
    /// Run the cross-validated representation × classifier × selection grid.
    Grid(GridArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Preprocess(_) => "preprocess",
            Command::Fit(_) => "fit",
            Command::Predict(_) => "predict",
            Command::Grid(_) => "grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Lr,
    Gnb,
    Mlp,
}

impl From<ModelChoice> for ClassifierKind {
    fn from(c: ModelChoice) -> Self {
        match c {
            ModelChoice::Lr => ClassifierKind::Lr,
            ModelChoice::Gnb => ClassifierKind::Gnb,
            ModelChoice::Mlp => ClassifierKind::Mlp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureChoice {
    Bow,
    Tfidf,
    Embed,
}

impl From<FeatureChoice> for Representation {
    fn from(c: FeatureChoice) -> Self {
        match c {
            FeatureChoice::Bow => Representation::Bow,
            FeatureChoice::Tfidf => Representation::Tfidf,
            FeatureChoice::Embed => Representation::Embeddings,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SynthArgs {
    /// Number of notes [default: 600]
    #[arg(long)]
    pub n: Option<usize>,
    /// Probability that a token comes from the class signal list [default: 0.7]
    #[arg(long)]
    pub signal: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; `.csv` selects CSV, anything else JSONL.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// [default: 0.5]
    #[arg(long)]
    pub positive_fraction: Option<f64>,
    /// [default: n / 3]
    #[arg(long)]
    pub n_patients: Option<usize>,
    /// [default: 2]
    #[arg(long)]
    pub patients_per_provider: Option<usize>,
    /// Synthetic background tokens [default: 500]
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// [default: 20]
    #[arg(long)]
    pub min_len: Option<usize>,
    /// [default: 60]
    #[arg(long)]
    pub max_len: Option<usize>,
}

/// Boolean switches accept `--flag`, `--flag=true` or `--flag=false`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TextFlags {
    /// Keep purely numeric tokens.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub keep_numeric: Option<bool>,
    /// Keep diacritics instead of folding them.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_fold_accents: Option<bool>,
    /// Stopword file, one token per line [default: bundled French list]
    #[arg(long, value_name = "PATH")]
    pub stopwords: Option<PathBuf>,
    /// Keep only notes from the first stay within 24 h of admission.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub first_stay: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FeatureFlags {
    /// Minimum document frequency [default: 1]
    #[arg(long)]
    pub min_df: Option<usize>,
    /// Embedding dimension [default: 100]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Skip-gram window [default: 5]
    #[arg(long)]
    pub window: Option<usize>,
    /// Skip-gram epochs [default: 5]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Skip-gram learning rate [default: 0.025]
    #[arg(long)]
    pub lr: Option<f64>,
    /// Negative samples per pair [default: 5]
    #[arg(long)]
    pub neg: Option<usize>,
    /// Train with the full softmax instead of negative sampling.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", conflicts_with = "neg")]
    pub full_softmax: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ClassifierFlags {
    /// Logistic-regression L2 strength [default: 1e-4]
    #[arg(long)]
    pub l2: Option<f64>,
    /// Classifier learning rate; applies to LR and MLP [default: LR 1.0, MLP 1e-3]
    #[arg(long)]
    pub clf_lr: Option<f64>,
    /// Classifier epochs; applies to LR and MLP [default: LR 500, MLP 200]
    #[arg(long)]
    pub clf_epochs: Option<usize>,
    /// MLP hidden layer widths, comma-separated [default: 100]
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// MLP mini-batch size [default: 32]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Gaussian NB variance smoothing [default: 1e-9]
    #[arg(long)]
    pub var_smoothing: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PreprocessArgs {
    /// Notes file (`.csv` or JSONL).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Token-document JSONL output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub text: TextFlags,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitArgs {
    /// Labeled notes file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Pipeline artifact output (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// [default: lr]
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// [default: tfidf]
    #[arg(long, value_enum)]
    pub features: Option<FeatureChoice>,
    /// Keep the K best features (chi² for bow/tfidf, ANOVA F for embed).
    #[arg(long)]
    pub select_k: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub text: TextFlags,
    #[command(flatten)]
    #[serde(flatten)]
    pub feature: FeatureFlags,
    #[command(flatten)]
    #[serde(flatten)]
    pub classifier: ClassifierFlags,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PredictArgs {
    /// Pipeline artifact written by `fit`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Notes file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// CSV output with columns id,probability,label.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Positive iff probability >= threshold [default: 0.5]
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GridArgs {
    /// Labeled notes file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of folds [default: 5]
    #[arg(long)]
    pub k: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Features kept in the "with selection" cells [default: 1000, capped at the feature count]
    #[arg(long)]
    pub select_k: Option<usize>,
    /// CSV report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Text table path [default: the CSV path with a `.txt` extension]
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Plain (unstratified) folds.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_stratify: Option<bool>,
    /// Assign folds per note instead of per connected patient/provider group.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_group_folds: Option<bool>,
    /// [default: 0.5]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Worker threads; results do not depend on it [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub text: TextFlags,
    #[command(flatten)]
    #[serde(flatten)]
    pub feature: FeatureFlags,
    #[command(flatten)]
    #[serde(flatten)]
    pub classifier: ClassifierFlags,
}
