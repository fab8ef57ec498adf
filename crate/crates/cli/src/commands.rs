use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use clinote::artifact::{load_json, save_json};
use clinote::classifiers::{ClassifierParams, GnbConfig, LogisticConfig, MlpConfig};
use clinote::corpus::{first_stay_filter, load_notes, write_notes, Corpus, Format, Label};
use clinote::embeddings::{Objective, SkipgramConfig};
use clinote::eval::{FoldFit, GridConfig, GridPlan};
use clinote::pipeline::{Pipeline, PipelineArtifact, PipelineConfig, RepresentationConfig};
use clinote::preprocess::{PreprocessOptions, Preprocessor, Stoplist};
use clinote::synth::{generate_corpus, SynthConfig};

use crate::args::{
    ClassifierFlags, FeatureChoice, FeatureFlags, FitArgs, GridArgs, ModelChoice, PredictArgs,
    PreprocessArgs, SynthArgs, TextFlags,
};
use crate::CliError;

const DEFAULT_SEED: u64 = 1;

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

fn write_io(path: &Path, result: std::io::Result<()>) -> Result<(), CliError> {
    result.map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn load_corpus(path: &Path, text: &TextFlags) -> Result<Corpus, CliError> {
    let corpus = load_notes(path, Format::from_path(path))?;
    Ok(if text.first_stay.unwrap_or(false) {
        first_stay_filter(&corpus)
    } else {
        corpus
    })
}

fn preprocessor(text: &TextFlags) -> Result<Preprocessor, CliError> {
    let options = PreprocessOptions {
        fold_accents: !text.no_fold_accents.unwrap_or(false),
        drop_numeric: !text.keep_numeric.unwrap_or(false),
    };
    let stoplist = match &text.stopwords {
        Some(path) => Stoplist::from_file(path)?,
        None => Stoplist::french(),
    };
    Ok(Preprocessor::new(options, stoplist))
}

fn representation_config(f: &FeatureFlags) -> RepresentationConfig {
    let base = RepresentationConfig::default();
    let sg = base.skipgram;
    let objective = if f.full_softmax.unwrap_or(false) {
        Objective::FullSoftmax
    } else {
        match (f.neg, sg.objective) {
            (Some(k), _) => Objective::NegativeSampling { k },
            (None, o) => o,
        }
    };
    RepresentationConfig {
        min_df: f.min_df.unwrap_or(base.min_df),
        skipgram: SkipgramConfig {
            dim: f.dim.unwrap_or(sg.dim),
            window: f.window.unwrap_or(sg.window),
            epochs: f.epochs.unwrap_or(sg.epochs),
            lr: f.lr.unwrap_or(sg.lr),
            seed: sg.seed,
            objective,
        },
    }
}

fn classifier_params(c: &ClassifierFlags) -> ClassifierParams {
    let (lr, mlp, gnb) = (LogisticConfig::default(), MlpConfig::default(), GnbConfig::default());
    ClassifierParams {
        lr: LogisticConfig {
            l2: c.l2.unwrap_or(lr.l2),
            lr: c.clf_lr.unwrap_or(lr.lr),
            epochs: c.clf_epochs.unwrap_or(lr.epochs),
        },
        gnb: GnbConfig {
            var_smoothing: c.var_smoothing.unwrap_or(gnb.var_smoothing),
        },
        mlp: MlpConfig {
            hidden: c.hidden.clone().unwrap_or(mlp.hidden),
            lr: c.clf_lr.unwrap_or(mlp.lr),
            epochs: c.clf_epochs.unwrap_or(mlp.epochs),
            batch_size: c.batch_size.unwrap_or(mlp.batch_size),
            seed: mlp.seed,
        },
    }
}

pub fn synth(a: SynthArgs) -> Result<(), CliError> {
    let out = required(a.out, "out")?;
    let base = SynthConfig::default();
    let cfg = SynthConfig {
        n_docs: a.n.unwrap_or(base.n_docs),
        doc_len_range: (
            a.min_len.unwrap_or(base.doc_len_range.0),
            a.max_len.unwrap_or(base.doc_len_range.1),
        ),
        vocab_size: a.vocab_size.unwrap_or(base.vocab_size),
        signal_strength: a.signal.unwrap_or(base.signal_strength),
        positive_fraction: a.positive_fraction.unwrap_or(base.positive_fraction),
        n_patients: a.n_patients.or(base.n_patients),
        patients_per_provider: a.patients_per_provider.unwrap_or(base.patients_per_provider),
        seed: a.seed.unwrap_or(base.seed),
        ..base
    };
    let corpus = generate_corpus(&cfg)?;
    write_notes(&corpus, &out, Format::from_path(&out))?;
    log::info!("wrote {} notes to {}", corpus.len(), out.display());
    Ok(())
}

pub fn preprocess(a: PreprocessArgs) -> Result<(), CliError> {
    let input = required(a.input, "input")?;
    let out = required(a.out, "out")?;
    let corpus = load_corpus(&input, &a.text)?;
    let docs = preprocessor(&a.text)?.process_all(corpus.notes());
    let mut w = create(&out)?;
    for doc in &docs {
        let line = serde_json::to_string(doc).map_err(clinote::Error::from)?;
        write_io(&out, writeln!(w, "{line}"))?;
    }
    write_io(&out, w.flush())?;
    log::info!("wrote {} token documents to {}", docs.len(), out.display());
    Ok(())
}

pub fn fit(a: FitArgs) -> Result<(), CliError> {
    let input = required(a.input, "input")?;
    let out = required(a.out, "out")?;
    let corpus = load_corpus(&input, &a.text)?;
    let config = PipelineConfig {
        representation: a.features.unwrap_or(FeatureChoice::Tfidf).into(),
        classifier: a.model.unwrap_or(ModelChoice::Lr).into(),
        features: representation_config(&a.feature),
        params: classifier_params(&a.classifier),
        select_k: a.select_k,
        seed: a.seed.unwrap_or(DEFAULT_SEED),
    };
    let pipeline = Pipeline::fit(corpus.notes(), preprocessor(&a.text)?, &config)?;
    save_json(&PipelineArtifact::new(&pipeline), &out)?;
    log::info!("fitted on {} notes; wrote {}", corpus.len(), out.display());
    Ok(())
}

pub fn predict(a: PredictArgs) -> Result<(), CliError> {
    let model = required(a.model, "model")?;
    let input = required(a.input, "input")?;
    let out = required(a.out, "out")?;
    let threshold = a.threshold.unwrap_or(0.5);
    let artifact: PipelineArtifact = load_json(&model)?;
    let pipeline = artifact.into_pipeline()?;
    let corpus = load_notes(&input, Format::from_path(&input))?;
    let scored = pipeline.predict(corpus.notes(), threshold)?;

    let mut w = csv::Writer::from_writer(create(&out)?);
    let csv_err = |e: csv::Error| CliError::Io(format!("cannot write {}: {e}", out.display()));
    w.write_record(["id", "probability", "label"]).map_err(csv_err)?;
    for (note, (p, label)) in corpus.notes().iter().zip(&scored) {
        let label = match label {
            Label::Positive => "Positive",
            _ => "Negative",
        };
        w.write_record([note.id.as_str(), &p.to_string(), label]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    log::info!("scored {} notes; wrote {}", scored.len(), out.display());
    Ok(())
}

pub fn grid(a: GridArgs) -> Result<(), CliError> {
    let input = required(a.input, "input")?;
    let out = required(a.out, "out")?;
    let table: PathBuf = a.table.clone().unwrap_or_else(|| out.with_extension("txt"));
    let base = GridConfig::default();
    let config = GridConfig {
        k_folds: a.k.unwrap_or(base.k_folds),
        stratified: !a.no_stratify.unwrap_or(false),
        group_folds: !a.no_group_folds.unwrap_or(false),
        seed: a.seed.unwrap_or(base.seed),
        select_k: a.select_k.or(base.select_k),
        threshold: a.threshold.unwrap_or(base.threshold),
        features: representation_config(&a.feature),
        params: classifier_params(&a.classifier),
    };
    if !config.group_folds {
        log::warn!("per-note folds: patients and providers may straddle train and test");
    }
    let corpus = load_corpus(&input, &a.text)?;
    let plan = GridPlan::new(&corpus, &preprocessor(&a.text)?, &config)?;
    let tasks = plan.tasks();
    log::info!(
        "grid: {} notes, {} folds, {} tasks",
        corpus.len(),
        config.k_folds,
        tasks.len()
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let fits: Vec<FoldFit> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&t| {
                let fit = plan.fit_fold(t);
                log::info!("done {} fold {}", t.representation.display_name(), t.fold);
                fit
            })
            .collect::<clinote::Result<Vec<_>>>()
    })?;
    let report = plan.assemble(&fits)?;

    for (path, body) in [(&out, report.to_csv()), (&table, report.to_table())] {
        write_io(path, std::fs::write(path, body))?;
    }
    print!("{}", report.to_table());
    log::info!("wrote {} and {}", out.display(), table.display());
    Ok(())
}
