use clinote::corpus::Corpus;
use clinote::embeddings::SkipgramConfig;
use clinote::eval::{FoldTask, GridConfig, GridPlan, Selection};
use clinote::classifiers::{ClassifierKind, MlpConfig};
use clinote::pipeline::{FittedRepresentation, Head, Representation};
use clinote::preprocess::Preprocessor;
use clinote::seed;
use clinote::synth::{generate_corpus, SynthConfig};

fn small_config() -> GridConfig {
    let mut cfg = GridConfig::default();
    cfg.features.skipgram = SkipgramConfig {
        dim: 8,
        epochs: 2,
        ..Default::default()
    };
    cfg.params.mlp = MlpConfig {
        hidden: vec![6],
        epochs: 10,
        ..Default::default()
    };
    cfg.select_k = Some(25);
    cfg
}

fn corpus() -> Corpus {
    generate_corpus(&SynthConfig {
        n_docs: 150,
        seed: 4,
        ..Default::default()
    })
    .unwrap()
}

#[test]
fn rewriting_held_out_notes_changes_no_fitted_state() {
    let original = corpus();
    let cfg = small_config();
    let pre = Preprocessor::default();
    let plan = GridPlan::new(&original, &pre, &cfg).unwrap();
    let held_out = plan.folds().test_indices(0);

    let mut notes = original.notes().to_vec();
    for &i in &held_out {
        notes[i].text = format!("zzveryrare{i} cec cec milri aorte ivrs {}", notes[i].text.len());
    }
    let mutated = Corpus::new(notes).unwrap();
    let plan2 = GridPlan::new(&mutated, &pre, &cfg).unwrap();
    assert_eq!(plan.folds(), plan2.folds());

    for representation in Representation::ALL {
        let task = FoldTask { fold: 0, representation };
        let a = plan.fit_fold(task).unwrap();
        let b = plan2.fit_fold(task).unwrap();
        assert_eq!(a.representation, b.representation, "{representation:?}");
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            assert_eq!(ca.head, cb.head, "{representation:?} {:?} {:?}", ca.classifier, ca.selection);
        }
    }
}

#[test]
fn fold_fit_equals_fitting_on_the_training_side_alone() {
    let corpus = corpus();
    let cfg = small_config();
    let plan = GridPlan::new(&corpus, &Preprocessor::default(), &cfg).unwrap();
    let fold = 2;
    let train = plan.folds().train_indices(fold);
    let docs: Vec<_> = train.iter().map(|&i| plan.docs()[i].clone()).collect();
    let y: Vec<bool> = docs.iter().map(|d| d.label.as_bool().unwrap()).collect();

    let representation = Representation::Tfidf;
    let fit = plan.fit_fold(FoldTask { fold, representation }).unwrap();
    let rep_seed = seed::derive_path(cfg.seed, &["grid", "tfidf", "2"]);
    let alone = FittedRepresentation::fit(&docs, representation, &cfg.features, rep_seed).unwrap();
    assert_eq!(fit.representation, alone);

    let x = alone.transform(&docs);
    for cell in &fit.cells {
        let k = match cell.selection {
            Selection::Without => None,
            Selection::With => Some(25),
        };
        let cell_seed = seed::derive_path(
            cfg.seed,
            &["grid", "tfidf", cell.classifier.key(), cell.selection.key(), "2"],
        );
        let head = Head::fit(&x, &y, representation.scorer(), k, cell.classifier, &cfg.params, cell_seed).unwrap();
        assert_eq!(cell.head, head, "{:?}", cell.classifier);
    }
    assert_eq!(fit.cells.len(), 2 * ClassifierKind::ALL.len());
}
