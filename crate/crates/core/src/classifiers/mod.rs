//! Binary classifiers trained by empirical-loss minimization.
//!
//! All three expose `P(Positive | x)`; [`Classifier`] dispatches between them
//! and is the serialized form.

mod logistic;
mod mlp;
mod naive_bayes;

use serde::{Deserialize, Serialize};

pub use logistic::{LogisticConfig, LogisticRegression};
pub use mlp::{Gradients, Layer, Mlp, MlpConfig};
pub use naive_bayes::{GaussianNb, GnbConfig};

use crate::artifact::{check_version, VERSION};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::vector::FeatureRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Lr,
    Gnb,
    Mlp,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Lr, ClassifierKind::Gnb, ClassifierKind::Mlp];

    /// Display name used in reports.
    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::Lr => "LR",
            ClassifierKind::Gnb => "GaussianNB",
            ClassifierKind::Mlp => "MLP-NN",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            ClassifierKind::Lr => "lr",
            ClassifierKind::Gnb => "gnb",
            ClassifierKind::Mlp => "mlp",
        }
    }
}

/// Hyperparameters for every classifier; only the chosen kind's entry is read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub lr: LogisticConfig,
    pub gnb: GnbConfig,
    pub mlp: MlpConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", rename_all = "snake_case")]
pub enum Classifier {
    Lr(LogisticRegression),
    Gnb(GaussianNb),
    Mlp(Mlp),
}

impl Classifier {
    /// Fits the chosen kind. `seed` only matters for the MLP.
    pub fn fit<R: FeatureRow>(
        kind: ClassifierKind,
        params: &ClassifierParams,
        x: &[R],
        y: &[bool],
        seed: u64,
    ) -> Result<Self> {
        Ok(match kind {
            ClassifierKind::Lr => Classifier::Lr(LogisticRegression::fit(x, y, &params.lr)?),
            ClassifierKind::Gnb => Classifier::Gnb(GaussianNb::fit(x, y, &params.gnb)?),
            ClassifierKind::Mlp => {
                let cfg = MlpConfig {
                    seed,
                    ..params.mlp.clone()
                };
                Classifier::Mlp(Mlp::fit(x, y, &cfg)?)
            }
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Classifier::Lr(_) => ClassifierKind::Lr,
            Classifier::Gnb(_) => ClassifierKind::Gnb,
            Classifier::Mlp(_) => ClassifierKind::Mlp,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Classifier::Lr(m) => m.input_dim(),
            Classifier::Gnb(m) => m.input_dim(),
            Classifier::Mlp(m) => m.input_dim(),
        }
    }

    pub fn predict_proba<R: FeatureRow>(&self, x: &R) -> Result<f64> {
        match self {
            Classifier::Lr(m) => m.predict_proba(x),
            Classifier::Gnb(m) => m.predict_proba(x),
            Classifier::Mlp(m) => m.predict_proba(x),
        }
    }

    pub fn predict<R: FeatureRow>(&self, x: &R, threshold: f64) -> Result<Label> {
        Ok(label_for(self.predict_proba(x)?, threshold))
    }

    fn validate(&self) -> Result<()> {
        match self {
            Classifier::Lr(m) => m.validate(),
            Classifier::Gnb(m) => m.validate(),
            Classifier::Mlp(m) => m.validate(),
        }
    }
}

/// `Positive` iff `probability >= threshold`.
pub fn label_for(probability: f64, threshold: f64) -> Label {
    Label::from_bool(probability >= threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub version: u32,
    #[serde(flatten)]
    pub model: Classifier,
}

impl ModelArtifact {
    pub fn new(model: Classifier) -> Self {
        Self {
            version: VERSION,
            model,
        }
    }

    pub fn into_model(self) -> Result<Classifier> {
        check_version("model", self.version)?;
        self.model.validate()?;
        Ok(self.model)
    }
}

/// Shared argument checks for `fit`; returns the input width.
pub(crate) fn check_training_set<R: FeatureRow>(x: &[R], y: &[bool]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
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

pub(crate) fn check_dim<R: FeatureRow>(expected: usize, x: &R) -> Result<()> {
    if x.dim() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            got: x.dim(),
        })
    }
}

pub(crate) fn finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("non-finite {what}")))
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy of logit `z` against target `y`, stable for large |z|.
pub(crate) fn bce_with_logit(z: f64, y: bool) -> f64 {
    let softplus = if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    };
    if y {
        softplus - z
    } else {
        softplus
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::DenseVector;

    #[test]
    fn threshold_rule() {
        assert_eq!(label_for(0.5, 0.5), Label::Positive);
        assert_eq!(label_for(0.49, 0.5), Label::Negative);
        assert_eq!(label_for(0.0, 0.0), Label::Positive);
        assert_eq!(label_for(1e-300, 0.0), Label::Positive);
    }

    #[test]
    fn bce_matches_naive_form() {
        for &z in &[-3.0, -0.2, 0.0, 0.7, 4.0] {
            let p = sigmoid(z);
            assert!((bce_with_logit(z, true) + p.ln()).abs() < 1e-12);
            assert!((bce_with_logit(z, false) + (1.0 - p).ln()).abs() < 1e-12);
        }
        assert!(bce_with_logit(800.0, false).is_finite());
        assert!(bce_with_logit(-800.0, true).is_finite());
    }

    #[test]
    fn artifact_tags_model_type() {
        let x = vec![DenseVector::new(vec![-1.0]), DenseVector::new(vec![1.0])];
        let y = [false, true];
        let model = Classifier::fit(ClassifierKind::Lr, &ClassifierParams::default(), &x, &y, 0).unwrap();
        let json = serde_json::to_value(ModelArtifact::new(model.clone())).unwrap();
        assert_eq!(json["model_type"], "lr");
        assert_eq!(json["version"], 1);
        let back: ModelArtifact = serde_json::from_value(json.clone()).unwrap();
        assert_eq!(back.into_model().unwrap(), model);

        let mut bad = json;
        bad["version"] = 999.into();
        let back: ModelArtifact = serde_json::from_value(bad).unwrap();
        assert!(matches!(back.into_model(), Err(Error::VersionMismatch { found: 999, .. })));
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let x = vec![DenseVector::new(vec![-1.0, 0.0]), DenseVector::new(vec![1.0, 0.0])];
        let y = [false, true];
        let params = ClassifierParams {
            mlp: MlpConfig {
                hidden: vec![3],
                epochs: 2,
                ..Default::default()
            },
            ..Default::default()
        };
        for kind in ClassifierKind::ALL {
            let model = Classifier::fit(kind, &params, &x, &y, 0).unwrap();
            assert!(matches!(
                model.predict(&DenseVector::new(vec![1.0]), 0.5),
                Err(Error::DimensionMismatch { expected: 2, got: 1 })
            ));
        }
    }
}
