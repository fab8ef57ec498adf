mod oracles;

use proptest::prelude::*;

use clinote::classifiers::{
    label_for, Classifier, ClassifierKind, ClassifierParams, GaussianNb, GnbConfig, LogisticRegression, Mlp,
    MlpConfig,
};
use clinote::corpus::split_disjoint;
use clinote::pipeline::{Pipeline, PipelineConfig, Representation};
use clinote::preprocess::Preprocessor;
use clinote::synth::{generate_corpus, SynthConfig};
use clinote::vector::DenseVector;

fn col(values: &[f64]) -> Vec<DenseVector> {
    values.iter().map(|&v| DenseVector::new(vec![v])).collect()
}

#[test]
fn naive_bayes_matches_closed_form_posterior() {
    // Class means -1 and +1, both with population variance 1.
    let x = col(&[-2.0, 0.0, 0.0, 2.0]);
    let y = [false, false, true, true];
    let m = GaussianNb::fit(&x, &y, &GnbConfig::default()).unwrap();
    // Total variance is 2, so smoothing adds 2e-9.
    let var = 1.0 + 2e-9;
    assert!((m.variances(false)[0] - var).abs() < 1e-15);
    for v in [-3.0, -0.7, -0.1, 0.05, 0.4, 1.0, 2.5] {
        let got = m.predict_proba(&DenseVector::new(vec![v])).unwrap();
        let want = oracles::symmetric_gaussian_posterior(v, var);
        assert!((got - want).abs() < 1e-9, "x={v}: {got} vs {want}");
    }
    let half = m.predict_proba(&DenseVector::new(vec![0.0])).unwrap();
    assert!((half - 0.5).abs() <= 1e-12);
}

#[test]
fn naive_bayes_far_point_is_confident() {
    let x = col(&[-1.1, -0.9, 0.9, 1.1]);
    let y = [false, false, true, true];
    let m = GaussianNb::fit(&x, &y, &GnbConfig::default()).unwrap();
    // sigma = 0.1, so the positive mean is 20 sigma from the negative one.
    assert!(m.predict_proba(&DenseVector::new(vec![1.0])).unwrap() > 0.99);
}

#[test]
fn mlp_solves_xor_on_most_seeds() {
    let x: Vec<DenseVector> = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
        .iter()
        .map(|r| DenseVector::new(r.to_vec()))
        .collect();
    let y = [false, true, true, false];
    let solved = (0..10u64)
        .filter(|&seed| {
            let cfg = MlpConfig {
                hidden: vec![8],
                lr: 0.5,
                epochs: 5000,
                batch_size: 4,
                seed,
            };
            let net = Mlp::fit(&x, &y, &cfg).unwrap();
            x.iter()
                .zip(&y)
                .all(|(r, &t)| (net.predict_proba(r).unwrap() >= 0.5) == t)
        })
        .count();
    assert!(solved >= 8, "solved on {solved}/10 seeds");
}

#[test]
fn every_classifier_generalizes_on_a_strong_signal() {
    let corpus = generate_corpus(&SynthConfig {
        n_docs: 300,
        signal_strength: 0.7,
        seed: 8,
        ..Default::default()
    })
    .unwrap();
    let (train, test) = split_disjoint(&corpus, 0.3, 8).unwrap();
    for classifier in ClassifierKind::ALL {
        let config = PipelineConfig {
            representation: Representation::Tfidf,
            classifier,
            ..Default::default()
        };
        let p = Pipeline::fit(train.notes(), Preprocessor::default(), &config).unwrap();
        let scored = p.predict(test.notes(), 0.5).unwrap();
        let correct = scored.iter().zip(test.notes()).filter(|((_, l), n)| *l == n.label).count();
        let acc = correct as f64 / test.len() as f64;
        assert!(acc >= 0.90, "{classifier:?}: held-out accuracy {acc}");
    }
}

#[test]
fn predictions_respect_the_threshold() {
    let x = col(&[-1.0, -0.5, 0.5, 1.0]);
    let y = [false, false, true, true];
    let model = Classifier::fit(ClassifierKind::Lr, &ClassifierParams::default(), &x, &y, 0).unwrap();
    for r in &x {
        let p = model.predict_proba(r).unwrap();
        assert_eq!(model.predict(r, 0.0).unwrap(), label_for(p, 0.0));
        assert!(model.predict(r, 0.0).unwrap().as_bool().unwrap());
    }
}

proptest! {
    #[test]
    fn logistic_labels_survive_positive_scaling(
        w in prop::collection::vec(-3.0f64..3.0, 4),
        b in -2.0f64..2.0,
        x in prop::collection::vec(-3.0f64..3.0, 4),
        scale in 0.01f64..100.0,
    ) {
        let row = DenseVector::new(x);
        let base = LogisticRegression::new(w.clone(), b, 0.0);
        prop_assume!(base.decision(&row).abs() > 1e-9);
        let scaled = LogisticRegression::new(w.iter().map(|v| v * scale).collect(), b * scale, 0.0);
        prop_assert_eq!(
            label_for(base.predict_proba(&row).unwrap(), 0.5),
            label_for(scaled.predict_proba(&row).unwrap(), 0.5)
        );
    }

    #[test]
    fn naive_bayes_log_joint_is_finite_within_a_million(v in -1e6f64..1e6) {
        let x = col(&[-1.0, -1.2, 1.0, 1.3]);
        let m = GaussianNb::fit(&x, &[false, false, true, true], &GnbConfig::default()).unwrap();
        let row = DenseVector::new(vec![v]);
        prop_assert!(m.log_joint(&row).unwrap().iter().all(|l| l.is_finite()));
        let [p0, p1] = m.posteriors(&row).unwrap();
        prop_assert!((p0 + p1 - 1.0).abs() <= 1e-12);
    }
}
