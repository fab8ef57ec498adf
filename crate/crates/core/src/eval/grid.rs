use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::folds::{group_kfold_split, kfold_split, Folds};
use super::metrics::{compute_metrics, Confusion, MetricsReport};
use crate::classifiers::{label_for, ClassifierKind, ClassifierParams};
use crate::corpus::{check_disjoint, contamination_groups, Corpus, Label, Note};
use crate::error::{Error, Result};
use crate::pipeline::{labels_of, FittedRepresentation, Head, Representation, RepresentationConfig};
use crate::preprocess::{Preprocessor, TokenDoc};
use crate::seed;
use crate::select::DEFAULT_K;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Without,
    With,
}

impl Selection {
    pub const ALL: [Selection; 2] = [Selection::Without, Selection::With];

    pub fn key(self) -> &'static str {
        match self {
            Selection::Without => "without",
            Selection::With => "with",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub k_folds: usize,
    pub stratified: bool,
    /// Keep every patient and provider inside a single fold and verify it.
    /// When off, folds are per note and no contamination check runs.
    pub group_folds: bool,
    pub seed: u64,
    /// Features kept in the "with" cells; capped at the representation width.
    /// Defaults to [`DEFAULT_K`].
    pub select_k: Option<usize>,
    pub threshold: f64,
    pub features: RepresentationConfig,
    pub params: ClassifierParams,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            k_folds: 5,
            stratified: true,
            group_folds: true,
            seed: 1,
            select_k: None,
            threshold: 0.5,
            features: RepresentationConfig::default(),
            params: ClassifierParams::default(),
        }
    }
}

/// One independent unit of grid work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FoldTask {
    pub fold: usize,
    pub representation: Representation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFit {
    pub classifier: ClassifierKind,
    pub selection: Selection,
    pub head: Head,
    pub metrics: MetricsReport,
}

/// Everything fitted for one task, with held-out metrics per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldFit {
    pub task: FoldTask,
    pub representation: FittedRepresentation,
    pub cells: Vec<CellFit>,
}

/// Preprocessed documents and fixed folds; tasks can run in any order or in
/// parallel and [`assemble`](Self::assemble) gives the same report.
#[derive(Debug, Clone)]
pub struct GridPlan {
    config: GridConfig,
    docs: Vec<TokenDoc>,
    labels: Vec<bool>,
    folds: Folds,
}

impl GridPlan {
    pub fn new(corpus: &Corpus, preprocessor: &Preprocessor, config: &GridConfig) -> Result<Self> {
        if !(0.0..=1.0).contains(&config.threshold) {
            return Err(Error::InvalidConfig(format!(
                "threshold must lie in [0, 1], got {}",
                config.threshold
            )));
        }
        let docs = preprocessor.process_all(corpus.notes());
        let labels = labels_of(&docs)?;
        let folds = if config.group_folds {
            let groups = contamination_groups(corpus.notes());
            group_kfold_split(&labels, &groups, config.k_folds, config.seed, config.stratified)?
        } else {
            kfold_split(&labels, config.k_folds, config.seed, config.stratified)?
        };
        if config.group_folds {
            check_fold_contamination(corpus.notes(), &folds)?;
        }
        Ok(Self {
            config: config.clone(),
            docs,
            labels,
            folds,
        })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn folds(&self) -> &Folds {
        &self.folds
    }

    pub fn docs(&self) -> &[TokenDoc] {
        &self.docs
    }

    /// Representation-major, fold-minor.
    pub fn tasks(&self) -> Vec<FoldTask> {
        Representation::ALL
            .iter()
            .flat_map(|&representation| {
                (0..self.folds.k()).map(move |fold| FoldTask {
                    fold,
                    representation,
                })
            })
            .collect()
    }

    /// Fits the representation on the training side of `task.fold`, then
    /// every selector and classifier on the resulting features. Held-out
    /// documents are only ever transformed and scored.
    pub fn fit_fold(&self, task: FoldTask) -> Result<FoldFit> {
        let pick = |idx: &[usize]| -> (Vec<TokenDoc>, Vec<bool>) {
            (
                idx.iter().map(|&i| self.docs[i].clone()).collect(),
                idx.iter().map(|&i| self.labels[i]).collect(),
            )
        };
        let (train_docs, train_y) = pick(&self.folds.train_indices(task.fold));
        let (test_docs, test_y) = pick(&self.folds.test_indices(task.fold));

        let rep = task.representation;
        let fold = task.fold.to_string();
        let rep_seed = seed::derive_path(self.config.seed, &["grid", rep.key(), &fold]);
        let representation =
            FittedRepresentation::fit(&train_docs, rep, &self.config.features, rep_seed)?;
        let x_train = representation.transform(&train_docs);
        let x_test = representation.transform(&test_docs);

        let mut cells = Vec::with_capacity(6);
        for selection in Selection::ALL {
            let k = match selection {
                Selection::Without => None,
                Selection::With => {
                    Some(self.config.select_k.unwrap_or(DEFAULT_K).min(representation.dim()))
                }
            };
            for classifier in ClassifierKind::ALL {
                let cell_seed = seed::derive_path(
                    self.config.seed,
                    &["grid", rep.key(), classifier.key(), selection.key(), &fold],
                );
                let head = Head::fit(
                    &x_train,
                    &train_y,
                    rep.scorer(),
                    k,
                    classifier,
                    &self.config.params,
                    cell_seed,
                )?;
                let predicted: Vec<bool> = head
                    .predict_proba(&x_test)?
                    .into_iter()
                    .map(|p| label_for(p, self.config.threshold) == Label::Positive)
                    .collect();
                let metrics = compute_metrics(&test_y, &predicted)?;
                cells.push(CellFit {
                    classifier,
                    selection,
                    head,
                    metrics,
                });
            }
        }
        Ok(FoldFit {
            task,
            representation,
            cells,
        })
    }

    /// Averages fold metrics into the 18-row report. Input order is
    /// irrelevant; every task must be present exactly once.
    pub fn assemble(&self, fits: &[FoldFit]) -> Result<GridReport> {
        let k = self.folds.k();
        let mut rows = Vec::with_capacity(18);
        for representation in Representation::ALL {
            let mut by_fold: Vec<&FoldFit> = fits
                .iter()
                .filter(|f| f.task.representation == representation)
                .collect();
            by_fold.sort_by_key(|f| f.task.fold);
            let complete = by_fold.len() == k && by_fold.iter().enumerate().all(|(i, f)| f.task.fold == i);
            if !complete {
                return Err(Error::InvalidConfig(format!(
                    "grid results for {} are incomplete",
                    representation.display_name()
                )));
            }
            for classifier in ClassifierKind::ALL {
                for selection in Selection::ALL {
                    let per_fold: Vec<MetricsReport> = by_fold
                        .iter()
                        .map(|f| {
                            f.cells
                                .iter()
                                .find(|c| c.classifier == classifier && c.selection == selection)
                                .map(|c| c.metrics)
                                .ok_or_else(|| Error::InvalidConfig("missing grid cell".into()))
                        })
                        .collect::<Result<_>>()?;
                    rows.push(GridRow {
                        representation,
                        classifier,
                        selection,
                        mean: fold_mean(&per_fold),
                        per_fold,
                    });
                }
            }
        }
        Ok(GridReport { rows })
    }
}

/// Serial reference schedule.
pub fn run_grid(corpus: &Corpus, preprocessor: &Preprocessor, config: &GridConfig) -> Result<GridReport> {
    let plan = GridPlan::new(corpus, preprocessor, config)?;
    let fits = plan
        .tasks()
        .into_iter()
        .map(|t| plan.fit_fold(t))
        .collect::<Result<Vec<_>>>()?;
    plan.assemble(&fits)
}

/// Fails unless every fold's train and test sides share no patient and no
/// provider.
pub fn check_fold_contamination(notes: &[Note], folds: &Folds) -> Result<()> {
    for fold in 0..folds.k() {
        let train = folds.train_indices(fold);
        let test = folds.test_indices(fold);
        check_disjoint(train.iter().map(|&i| &notes[i]), test.iter().map(|&i| &notes[i]))?;
    }
    Ok(())
}

/// Unweighted means of the four rates; confusion counts are summed.
fn fold_mean(folds: &[MetricsReport]) -> MetricsReport {
    let n = folds.len() as f64;
    let mean = |f: fn(&MetricsReport) -> f64| folds.iter().map(f).sum::<f64>() / n;
    let mut confusion = Confusion::default();
    for m in folds {
        confusion.tp += m.confusion.tp;
        confusion.fp += m.confusion.fp;
        confusion.fn_ += m.confusion.fn_;
        confusion.tn += m.confusion.tn;
    }
    MetricsReport {
        acc: mean(|m| m.acc),
        pre: mean(|m| m.pre),
        rec: mean(|m| m.rec),
        f1: mean(|m| m.f1),
        confusion,
        zero_division: folds.iter().any(|m| m.zero_division),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub representation: Representation,
    pub classifier: ClassifierKind,
    pub selection: Selection,
    pub mean: MetricsReport,
    pub per_fold: Vec<MetricsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub rows: Vec<GridRow>,
}

impl GridReport {
    pub fn row(
        &self,
        representation: Representation,
        classifier: ClassifierKind,
        selection: Selection,
    ) -> Option<&GridRow> {
        self.rows.iter().find(|r| {
            r.representation == representation && r.classifier == classifier && r.selection == selection
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("representation,classifier,selection,acc,pre,rec,f1\n");
        for r in &self.rows {
            let m = &r.mean;
            let _ = writeln!(
                out,
                "{},{},{},{:.4},{:.4},{:.4},{:.4}",
                r.representation.display_name(),
                r.classifier.display_name(),
                r.selection.key(),
                m.acc,
                m.pre,
                m.rec,
                m.f1
            );
        }
        out
    }

    /// One line per representation and classifier, with the metrics without
    /// and with selection side by side.
    pub fn to_table(&self) -> String {
        let header = [
            "Representation", "Classifier", "acc", "pre", "rec", "f1", "acc", "pre", "rec", "f1",
        ];
        let mut lines: Vec<Vec<String>> = Vec::new();
        for representation in Representation::ALL {
            for classifier in ClassifierKind::ALL {
                let mut line = vec![
                    representation.display_name().to_string(),
                    classifier.display_name().to_string(),
                ];
                for selection in Selection::ALL {
                    if let Some(r) = self.row(representation, classifier, selection) {
                        let m = &r.mean;
                        line.extend([m.acc, m.pre, m.rec, m.f1].iter().map(|v| format!("{v:.4}")));
                    }
                }
                lines.push(line);
            }
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| {
                lines
                    .iter()
                    .filter_map(|l| l.get(c).map(String::len))
                    .chain([header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let render = |cells: &[String]| -> String {
            let mut s = String::new();
            for (c, cell) in cells.iter().enumerate() {
                if c == 2 || c == 6 {
                    s.push_str(" |");
                }
                if c > 0 {
                    s.push(' ');
                }
                if c < 2 {
                    let _ = write!(s, "{cell:<w$}", w = widths[c]);
                } else {
                    let _ = write!(s, "{cell:>w$}", w = widths[c]);
                }
            }
            s.trim_end().to_string()
        };
        let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
        let first = render(&head);
        let split = first.find(" |").unwrap_or(0);
        let group_width = widths[2..6].iter().sum::<usize>() + 3;
        let mut out = format!(
            "{}| {:^gw$} | {:^gw$}\n",
            " ".repeat(split + 1),
            "without selection",
            "with selection",
            gw = group_width
        );
        out.push_str(&first);
        out.push('\n');
        out.push_str(&"-".repeat(first.chars().count()));
        out.push('\n');
        for line in &lines {
            out.push_str(&render(line));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(acc: f64) -> MetricsReport {
        MetricsReport {
            acc,
            pre: acc,
            rec: acc,
            f1: acc,
            confusion: Confusion { tp: 1, fp: 0, fn_: 0, tn: 1 },
            zero_division: false,
        }
    }

    #[test]
    fn mean_is_unweighted() {
        let mean = fold_mean(&[m(0.5), m(1.0)]);
        assert_eq!(mean.acc, 0.75);
        assert_eq!(mean.confusion.tp, 2);
    }

    #[test]
    fn report_renderings_have_every_cell() {
        let mut rows = Vec::new();
        for representation in Representation::ALL {
            for classifier in ClassifierKind::ALL {
                for selection in Selection::ALL {
                    rows.push(GridRow {
                        representation,
                        classifier,
                        selection,
                        mean: m(0.8125),
                        per_fold: vec![m(0.8125)],
                    });
                }
            }
        }
        let report = GridReport { rows };
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 19);
        assert!(csv.contains("TF-IDF,MLP-NN,without,0.8125,0.8125,0.8125,0.8125\n"));
        let table = report.to_table();
        assert_eq!(table.lines().count(), 3 + 9);
        assert!(table.lines().nth(3).unwrap().starts_with("BoW"));
    }
}
