//! Text normalization, tokenization and stopword removal.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{Label, Note};
use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_fr.txt");

/// A note reduced to its token sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenDoc {
    pub note_id: String,
    pub tokens: Vec<String>,
    #[serde(default)]
    pub label: Label,
}

impl TokenDoc {
    pub fn new(note_id: impl Into<String>, tokens: Vec<String>, label: Label) -> Self {
        Self {
            note_id: note_id.into(),
            tokens,
            label,
        }
    }

    /// Unlabeled document from string slices; mostly useful in tests.
    pub fn from_tokens(tokens: &[&str]) -> Self {
        Self::new("", tokens.iter().map(|t| t.to_string()).collect(), Label::Unlabeled)
    }
}

/// Lowercases `text` and, when `fold_accents` is set, strips Latin
/// diacritics and expands ligatures (`é` to `e`, `œ` to `oe`).
pub fn normalize(text: &str, fold_accents: bool) -> String {
    let lower = text.to_lowercase();
    if !fold_accents {
        return lower.nfc().collect();
    }
    let mut out = String::with_capacity(lower.len());
    for c in lower.nfd() {
        if is_combining_mark(c) {
            continue;
        }
        match c {
            'œ' => out.push_str("oe"),
            'æ' => out.push_str("ae"),
            'ß' => out.push_str("ss"),
            'ø' => out.push('o'),
            'đ' => out.push('d'),
            'ł' => out.push('l'),
            _ => out.push(c),
        }
    }
    out
}

/// True for tokens made only of digits, `.`, `,` and `%` (with at least one
/// digit).
pub fn is_numeric_token(token: &str) -> bool {
    token.chars().any(char::is_numeric)
        && token
            .chars()
            .all(|c| c.is_numeric() || matches!(c, '.' | ',' | '%'))
}

/// Splits normalized text into maximal runs of letters and digits. A hyphen
/// joins two runs when it sits directly between alphanumerics; every other
/// character separates.
pub fn tokenize(text: &str, drop_numeric: bool) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
            continue;
        }
        let joins = c == '-'
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if joins {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if drop_numeric {
        tokens.retain(|t| !is_numeric_token(t));
    }
    tokens
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses the one-token-per-line format; `#` starts a comment.
    pub fn parse(contents: &str) -> Self {
        Self::new(
            contents
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty()),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&contents))
    }

    /// The bundled French list.
    pub fn french() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Entries in lexicographic order.
    pub fn sorted_words(&self) -> Vec<String> {
        let mut words: Vec<String> = self.words.iter().cloned().collect();
        words.sort_unstable();
        words
    }

    fn normalized(&self, fold_accents: bool) -> Self {
        Self::new(self.words.iter().map(|w| normalize(w, fold_accents)))
    }
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessOptions {
    pub fold_accents: bool,
    pub drop_numeric: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            fold_accents: true,
            drop_numeric: true,
        }
    }
}

/// The full text-to-tokens pipeline with a fixed stoplist.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    options: PreprocessOptions,
    stoplist: Stoplist,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Self::new(PreprocessOptions::default(), Stoplist::french())
    }
}

impl Preprocessor {
    /// Stoplist entries are normalized with the same settings as the text.
    pub fn new(options: PreprocessOptions, stoplist: Stoplist) -> Self {
        Self {
            stoplist: stoplist.normalized(options.fold_accents),
            options,
        }
    }

    pub fn options(&self) -> PreprocessOptions {
        self.options
    }

    /// The stoplist after normalization.
    pub fn stoplist(&self) -> &Stoplist {
        &self.stoplist
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        let normalized = normalize(text, self.options.fold_accents);
        remove_stopwords(
            tokenize(&normalized, self.options.drop_numeric),
            &self.stoplist,
        )
    }

    pub fn process(&self, note: &Note) -> TokenDoc {
        TokenDoc::new(note.id.clone(), self.tokens(&note.text), note.label)
    }

    pub fn process_all(&self, notes: &[Note]) -> Vec<TokenDoc> {
        notes.iter().map(|n| self.process(n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Défaillance Cardiaque", true), "defaillance cardiaque");
        assert_eq!(normalize("", true), "");
        assert_eq!(normalize("", false), "");
        assert_eq!(normalize("Pro-BNP", false), "pro-bnp");
        assert_eq!(normalize("Cœur Ça À", true), "coeur ca a");
        assert_eq!(normalize("été", false), "été");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("fe 45% et fr 20", true), strs(&["fe", "et", "fr"]));
        assert_eq!(tokenize("pro-bnp 1200 ng/l", true), strs(&["pro-bnp", "ng", "l"]));
        assert_eq!(tokenize("", true), Vec::<String>::new());
        assert_eq!(tokenize("pro-bnp 1200", false), strs(&["pro-bnp", "1200"]));
        assert_eq!(tokenize("-a- b--c d-", false), strs(&["a", "b", "c", "d"]));
        assert_eq!(tokenize("l'insuffisance, 3.5", true), strs(&["l", "insuffisance"]));
    }

    #[test]
    fn stopword_examples() {
        let stop = Stoplist::new(["la", "est"]);
        assert_eq!(
            remove_stopwords(strs(&["la", "valve", "est", "ok"]), &stop),
            strs(&["valve", "ok"])
        );
        assert!(remove_stopwords(strs(&["la", "est"]), &stop).is_empty());
        let input = strs(&["la", "valve"]);
        assert_eq!(remove_stopwords(input.clone(), &Stoplist::default()), input);
    }

    #[test]
    fn stoplist_file_format() {
        let s = Stoplist::parse("# header\nle\n  la  \n\nété # trailing\n");
        assert_eq!(s.len(), 3);
        assert!(s.contains("été"));
        // Folded when the pipeline folds.
        let p = Preprocessor::new(PreprocessOptions::default(), s);
        assert_eq!(p.tokens("Été stable"), strs(&["stable"]));
    }

    #[test]
    fn bundled_list_spares_clinical_terms() {
        let stop = Stoplist::french();
        assert!(stop.contains("le") && stop.contains("est"));
        for t in ["cec", "cia", "civ", "fc", "po", "sop", "ivrs", "valve", "milri"] {
            assert!(!stop.contains(t), "{t} must not be a stopword");
        }
    }

    #[test]
    fn pipeline_drops_numbers_by_default() {
        let p = Preprocessor::default();
        assert_eq!(p.tokens("Le Pro-BNP est à 1200 ng/L."), strs(&["pro-bnp", "ng"]));
        let keep = Preprocessor::new(
            PreprocessOptions {
                drop_numeric: false,
                ..Default::default()
            },
            Stoplist::french(),
        );
        assert_eq!(keep.tokens("pro-bnp 1200"), strs(&["pro-bnp", "1200"]));
    }

    proptest! {
        #[test]
        fn pipeline_is_idempotent(text in "[ a-zA-Z0-9éèàçÉÀœ%,./'-]{0,60}", fold in any::<bool>(), drop in any::<bool>()) {
            let p = Preprocessor::new(PreprocessOptions { fold_accents: fold, drop_numeric: drop }, Stoplist::french());
            let once = p.tokens(&text);
            let twice = p.tokens(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_are_clean(text in "\\PC{0,80}") {
            let p = Preprocessor::default();
            let stop = Stoplist::french();
            for t in p.tokens(&text) {
                prop_assert!(!t.is_empty());
                prop_assert_eq!(t.to_lowercase(), t.clone());
                prop_assert!(!is_numeric_token(&t));
                prop_assert!(!stop.contains(&t));
            }
        }

        #[test]
        fn stopword_removal_never_grows(tokens in proptest::collection::vec("[a-e]{1,2}", 0..20)) {
            let stop = Stoplist::new(["a", "bc", "d"]);
            let out = remove_stopwords(tokens.clone(), &stop);
            prop_assert!(out.len() <= tokens.len());
            prop_assert!(out.iter().all(|t| !stop.contains(t)));
        }
    }
}
