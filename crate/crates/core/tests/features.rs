mod oracles;

use proptest::prelude::*;

use clinote::features::{bow_vectorize, build_vocab, tfidf_fit, tfidf_transform};
use clinote::preprocess::TokenDoc;

fn corpus_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
    let token = prop::sample::select(vec!["a", "b", "c", "dd", "e", "f", "g"]).prop_map(String::from);
    prop::collection::vec(prop::collection::vec(token, 0..8), 1..=10)
}

fn docs_of(corpus: &[Vec<String>]) -> Vec<TokenDoc> {
    corpus
        .iter()
        .map(|t| TokenDoc::new("", t.clone(), Default::default()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tfidf_matches_brute_force(corpus in corpus_strategy(), extra in prop::collection::vec("[a-h]", 0..6)) {
        let docs = docs_of(&corpus);
        prop_assume!(corpus.iter().any(|d| !d.is_empty()));
        let vocab = build_vocab(&docs, 1).unwrap();
        let idf = tfidf_fit(&docs, &vocab).unwrap();
        let mut probes = docs.clone();
        probes.push(TokenDoc::new("", extra, Default::default()));
        for doc in &probes {
            let got = tfidf_transform(doc, &vocab, &idf);
            let want = oracles::tfidf(&corpus, &doc.tokens);
            prop_assert_eq!(got.nnz(), want.len());
            for (token, w) in &want {
                let i = vocab.get(token).unwrap();
                prop_assert!((got.get(i) - w).abs() <= 1e-12, "{} {} vs {}", token, got.get(i), w);
            }
            let norm = got.norm();
            prop_assert!(norm == 0.0 || (norm - 1.0).abs() <= 1e-12);
            // Same support as the count vector.
            let bow = bow_vectorize(doc, &vocab);
            let support = |v: &clinote::vector::SparseVector| v.entries().iter().map(|e| e.0).collect::<Vec<_>>();
            prop_assert_eq!(support(&bow), support(&got));
        }
        prop_assert!(idf.idf().iter().all(|&v| v >= 1.0));
    }

    #[test]
    fn vocabulary_respects_min_df(corpus in corpus_strategy(), min_df in 1usize..4) {
        let docs = docs_of(&corpus);
        match build_vocab(&docs, min_df) {
            Ok(vocab) => {
                prop_assert_eq!(vocab.n_docs(), corpus.len());
                for (i, t) in vocab.tokens().iter().enumerate() {
                    let df = corpus.iter().filter(|d| d.contains(t)).count();
                    prop_assert_eq!(vocab.doc_freq()[i], df);
                    prop_assert!(df >= min_df && df <= corpus.len());
                    prop_assert_eq!(vocab.get(t), Some(i));
                }
                let kept = corpus.iter().flatten().filter(|t| {
                    corpus.iter().filter(|d| d.contains(t)).count() >= min_df
                }).collect::<std::collections::HashSet<_>>().len();
                prop_assert_eq!(vocab.len(), kept);
            }
            Err(clinote::Error::EmptyVocabulary) => {
                prop_assert!(corpus.iter().flatten().all(|t| corpus.iter().filter(|d| d.contains(t)).count() < min_df));
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}
