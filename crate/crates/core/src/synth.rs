//! Seeded labeled pseudo-clinical corpora with a tunable class signal.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label, Note};
use crate::error::{Error, Result};
use crate::seed;

/// French filler shared by both classes: stopwords, inflected words with
/// accents, digits.
const FILLER: &[&str] = &[
    "le", "la", "les", "de", "des", "du", "et", "est", "à", "au", "avec", "pour", "sur", "dans",
    "une", "un", "il", "elle", "pas", "ce", "matin", "soir", "nuit", "journée", "patient",
    "enfant", "évaluation", "examen", "suivi", "très", "été", "bien", "selon", "après", "depuis",
    "réanimation", "poursuite", "traitement", "contrôle", "notée",
];

const NUMBERS: &[&str] = &["12", "24", "37,5", "45%", "1200", "3.5", "80"];

fn strings(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_docs: usize,
    /// Inclusive token-count bounds.
    pub doc_len_range: (usize, usize),
    /// Number of synthetic background tokens `w0001…`.
    pub vocab_size: usize,
    pub signal_words_pos: Vec<String>,
    pub signal_words_neg: Vec<String>,
    /// Probability that a token is drawn from the class's signal list.
    pub signal_strength: f64,
    pub positive_fraction: f64,
    /// `None` gives one patient per three notes.
    pub n_patients: Option<usize>,
    /// Consecutive patients share a provider in blocks of this size.
    pub patients_per_provider: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_docs: 600,
            doc_len_range: (20, 60),
            vocab_size: 500,
            signal_words_pos: strings(&[
                "civ", "cec", "cia", "fc", "milri", "milrinone", "aortique", "aorte", "valve",
            ]),
            signal_words_neg: strings(&[
                "ivrs", "bronchiolite", "asthme", "eupneique", "afebrile", "stable", "po",
                "saturation", "sevrage",
            ]),
            signal_strength: 0.7,
            positive_fraction: 0.5,
            n_patients: None,
            patients_per_provider: 2,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn patients(&self) -> usize {
        self.n_patients.unwrap_or((self.n_docs / 3).max(1))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let (lo, hi) = self.doc_len_range;
        if lo > hi {
            return bad(format!("doc_len_range ({lo}, {hi}) has min > max"));
        }
        if !(0.0..=1.0).contains(&self.signal_strength) {
            return bad(format!("signal_strength {} outside [0, 1]", self.signal_strength));
        }
        if !(self.positive_fraction > 0.0 && self.positive_fraction < 1.0) {
            return bad(format!("positive_fraction {} outside (0, 1)", self.positive_fraction));
        }
        if self.vocab_size == 0 {
            return bad("vocab_size must be >= 1".into());
        }
        if self.patients() == 0 || self.patients_per_provider == 0 {
            return bad("n_patients and patients_per_provider must be >= 1".into());
        }
        if self.signal_strength > 0.0
            && (self.signal_words_pos.is_empty() || self.signal_words_neg.is_empty())
        {
            return bad("signal lists must be non-empty when signal_strength > 0".into());
        }
        let pos: HashSet<&String> = self.signal_words_pos.iter().collect();
        if let Some(w) = self.signal_words_neg.iter().find(|w| pos.contains(w)) {
            return bad(format!("signal word {w:?} appears in both classes"));
        }
        Ok(())
    }
}

pub fn generate_corpus(cfg: &SynthConfig) -> Result<Corpus> {
    cfg.validate()?;
    let mut rng = seed::rng(seed::derive(cfg.seed, "synth"));

    let n_pos = ((cfg.n_docs as f64) * cfg.positive_fraction).round() as usize;
    let mut labels: Vec<bool> = (0..cfg.n_docs).map(|i| i < n_pos).collect();
    labels.shuffle(&mut rng);

    let background: Vec<String> = (1..=cfg.vocab_size).map(|i| format!("w{i:04}")).collect();
    let n_patients = cfg.patients();
    let (lo, hi) = cfg.doc_len_range;

    let mut notes = Vec::with_capacity(cfg.n_docs);
    for (i, &positive) in labels.iter().enumerate() {
        let signal = if positive {
            &cfg.signal_words_pos
        } else {
            &cfg.signal_words_neg
        };
        let len = rng.gen_range(lo..=hi);
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for _ in 0..len {
            let word = if rng.gen::<f64>() < cfg.signal_strength {
                signal[rng.gen_range(0..signal.len())].as_str()
            } else {
                let u = rng.gen::<f64>();
                if u < 0.3 {
                    FILLER[rng.gen_range(0..FILLER.len())]
                } else if u < 0.35 {
                    NUMBERS[rng.gen_range(0..NUMBERS.len())]
                } else {
                    background[rng.gen_range(0..background.len())].as_str()
                }
            };
            words.push(word);
        }
        let patient = i % n_patients;
        notes.push(Note {
            id: format!("n{i:05}"),
            patient_id: format!("p{patient:04}"),
            provider_id: format!("d{:04}", patient / cfg.patients_per_provider),
            stay_index: 1,
            hours_since_admission: Some(rng.gen_range(0..24) as f64),
            text: render_text(&words),
            label: Label::from_bool(positive),
        });
    }
    Corpus::new(notes)
}

/// Capitalized first word, a comma every seventh word, final period.
fn render_text(words: &[&str]) -> String {
    let mut text = String::new();
    for (j, w) in words.iter().enumerate() {
        if j > 0 {
            text.push_str(if j % 7 == 0 { ", " } else { " " });
        }
        if j == 0 {
            let mut chars = w.chars();
            if let Some(first) = chars.next() {
                text.extend(first.to_uppercase());
                text.push_str(chars.as_str());
            }
        } else {
            text.push_str(w);
        }
    }
    if !text.is_empty() {
        text.push('.');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::write_jsonl;

    fn bytes(corpus: &Corpus) -> Vec<u8> {
        let mut out = Vec::new();
        write_jsonl(corpus, &mut out).unwrap();
        out
    }

    #[test]
    fn deterministic_by_seed() {
        let cfg = SynthConfig {
            n_docs: 50,
            ..Default::default()
        };
        assert_eq!(bytes(&generate_corpus(&cfg).unwrap()), bytes(&generate_corpus(&cfg).unwrap()));
        let other = SynthConfig { seed: 2, ..cfg.clone() };
        assert_ne!(bytes(&generate_corpus(&cfg).unwrap()), bytes(&generate_corpus(&other).unwrap()));
    }

    #[test]
    fn empty_corpus() {
        let cfg = SynthConfig {
            n_docs: 0,
            ..Default::default()
        };
        assert!(generate_corpus(&cfg).unwrap().is_empty());
    }

    #[test]
    fn invalid_configs() {
        let overlap = SynthConfig {
            signal_words_neg: vec!["cec".into()],
            ..Default::default()
        };
        let inverted = SynthConfig {
            doc_len_range: (9, 3),
            ..Default::default()
        };
        let fraction = SynthConfig {
            positive_fraction: 1.0,
            ..Default::default()
        };
        for cfg in [overlap, inverted, fraction] {
            assert!(matches!(generate_corpus(&cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn round_robin_patients() {
        let cfg = SynthConfig {
            n_docs: 12,
            n_patients: Some(4),
            ..Default::default()
        };
        let corpus = generate_corpus(&cfg).unwrap();
        let ids: Vec<&str> = corpus.notes().iter().map(|n| n.patient_id.as_str()).collect();
        assert_eq!(&ids[..5], &["p0000", "p0001", "p0002", "p0003", "p0000"]);
        assert_eq!(corpus.notes()[3].provider_id, "d0001");
        for n in corpus.notes() {
            let len = n.text.split(' ').count();
            assert!((20..=60).contains(&len));
        }
    }
}
