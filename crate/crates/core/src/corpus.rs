//! Labeled notes: loading, stay filtering and contamination-free splitting.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Note label. `Positive` is the cardiac-failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
    #[default]
    Unlabeled,
}

impl Label {
    pub fn is_labeled(self) -> bool {
        self != Label::Unlabeled
    }

    /// `Some(true)` for Positive, `Some(false)` for Negative.
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Label::Positive => Some(true),
            Label::Negative => Some(false),
            Label::Unlabeled => None,
        }
    }

    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    fn parse(raw: Option<&str>) -> std::result::Result<Self, String> {
        match raw.map(str::trim) {
            None | Some("") => Ok(Label::Unlabeled),
            Some("Positive") => Ok(Label::Positive),
            Some("Negative") => Ok(Label::Negative),
            Some(other) => Err(format!("unknown label {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Note {
    pub id: String,
    pub patient_id: String,
    pub provider_id: String,
    pub stay_index: u32,
    pub hours_since_admission: Option<f64>,
    pub text: String,
    pub label: Label,
}

/// On-disk JSONL record. Unknown fields are ignored.
#[derive(Debug, Serialize, Deserialize)]
struct NoteRecord {
    id: String,
    patient_id: String,
    provider_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stay_index: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hours_since_admission: Option<f64>,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

const CSV_HEADER: [&str; 7] = [
    "id",
    "patient_id",
    "provider_id",
    "stay_index",
    "hours_since_admission",
    "label",
    "text",
];

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    id: String,
    patient_id: String,
    provider_id: String,
    stay_index: Option<i64>,
    hours_since_admission: Option<f64>,
    label: Option<String>,
    text: String,
}

impl NoteRecord {
    fn into_note(self, line: usize) -> Result<Note> {
        build_note(
            line,
            self.id,
            self.patient_id,
            self.provider_id,
            self.stay_index,
            self.hours_since_admission,
            self.text,
            self.label.as_deref(),
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn build_note(
    line: usize,
    id: String,
    patient_id: String,
    provider_id: String,
    stay_index: Option<i64>,
    hours: Option<f64>,
    text: String,
    label: Option<&str>,
) -> Result<Note> {
    let malformed = |reason: String| Error::MalformedRecord { line, reason };
    let stay_index = match stay_index {
        None => 1,
        Some(s) if s >= 1 && s <= i64::from(u32::MAX) => s as u32,
        Some(s) => return Err(malformed(format!("stay_index must be >= 1, got {s}"))),
    };
    if let Some(h) = hours {
        if !(h >= 0.0) || !h.is_finite() {
            return Err(malformed(format!(
                "hours_since_admission must be a finite value >= 0, got {h}"
            )));
        }
    }
    let label = Label::parse(label).map_err(malformed)?;
    Ok(Note {
        id,
        patient_id,
        provider_id,
        stay_index,
        hours_since_admission: hours,
        text,
        label,
    })
}

fn label_field(label: Label) -> Option<String> {
    match label {
        Label::Positive => Some("Positive".into()),
        Label::Negative => Some("Negative".into()),
        Label::Unlabeled => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

/// An ordered, id-unique collection of notes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    notes: Vec<Note>,
}

impl Corpus {
    pub fn new(notes: Vec<Note>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(notes.len());
        for n in &notes {
            if !seen.insert(n.id.as_str()) {
                return Err(Error::DuplicateId(n.id.clone()));
            }
        }
        Ok(Self { notes })
    }

    pub fn notes(&self) -> &[Note] {
        &self.notes
    }

    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }

    pub fn into_notes(self) -> Vec<Note> {
        self.notes
    }

    /// Notes at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            notes: indices.iter().map(|&i| self.notes[i].clone()).collect(),
        }
    }
}

pub fn load_notes(path: &Path, format: Format) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::Jsonl => read_jsonl(BufReader::new(file), path),
        Format::Csv => read_csv(file),
    }
}

fn read_jsonl(reader: impl BufRead, path: &Path) -> Result<Corpus> {
    let mut notes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::MalformedRecord {
                line: line_no,
                reason: "invalid UTF-8".into(),
            },
            _ => Error::io(path, e),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: NoteRecord =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: line_no,
                reason: e.to_string(),
            })?;
        notes.push(record.into_note(line_no)?);
    }
    Corpus::new(notes)
}

fn read_csv(reader: impl std::io::Read) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::MalformedRecord {
        line: 1,
        reason: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::MalformedRecord {
            line: 1,
            reason: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let header = header.clone();
    let mut notes = Vec::new();
    for result in rdr.records() {
        let malformed = |e: csv::Error| Error::MalformedRecord {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        };
        let raw = result.map_err(malformed)?;
        let line = raw.position().map_or(0, |p| p.line() as usize);
        let record: CsvRecord = raw.deserialize(Some(&header)).map_err(|e| {
            Error::MalformedRecord {
                line,
                reason: e.to_string(),
            }
        })?;
        notes.push(build_note(
            line,
            record.id,
            record.patient_id,
            record.provider_id,
            record.stay_index,
            record.hours_since_admission,
            record.text,
            record.label.as_deref(),
        )?);
    }
    Corpus::new(notes)
}

pub fn write_notes(corpus: &Corpus, path: &Path, format: Format) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    match format {
        Format::Jsonl => {
            let mut out = BufWriter::new(file);
            write_jsonl(corpus, &mut out).map_err(|e| Error::io(path, e))?;
            out.flush().map_err(|e| Error::io(path, e))
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(file);
            let to_io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
            for n in corpus.notes() {
                wtr.serialize(CsvRecord {
                    id: n.id.clone(),
                    patient_id: n.patient_id.clone(),
                    provider_id: n.provider_id.clone(),
                    stay_index: Some(i64::from(n.stay_index)),
                    hours_since_admission: n.hours_since_admission,
                    label: label_field(n.label),
                    text: n.text.clone(),
                })
                .map_err(to_io)?;
            }
            wtr.flush().map_err(|e| Error::io(path, e))
        }
    }
}

/// Writes one JSON object per note. A `stay_index` of 1 is omitted since it is
/// the default.
pub fn write_jsonl(corpus: &Corpus, out: &mut impl Write) -> std::io::Result<()> {
    for n in corpus.notes() {
        let record = NoteRecord {
            id: n.id.clone(),
            patient_id: n.patient_id.clone(),
            provider_id: n.provider_id.clone(),
            stay_index: (n.stay_index != 1).then_some(i64::from(n.stay_index)),
            hours_since_admission: n.hours_since_admission,
            text: n.text.clone(),
            label: label_field(n.label),
        };
        serde_json::to_writer(&mut *out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Keeps notes from the first ICU stay written within 24 hours of admission.
/// Notes without a timestamp are kept.
pub fn first_stay_filter(corpus: &Corpus) -> Corpus {
    Corpus {
        notes: corpus
            .notes
            .iter()
            .filter(|n| n.stay_index == 1 && n.hours_since_admission.is_none_or(|h| h <= 24.0))
            .cloned()
            .collect(),
    }
}

/// Connected components of the bipartite patient/provider graph, one id per
/// note. Ids are dense and numbered in order of first appearance.
pub fn contamination_groups(notes: &[Note]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..notes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut by_patient: HashMap<&str, usize> = HashMap::new();
    let mut by_provider: HashMap<&str, usize> = HashMap::new();
    for (i, n) in notes.iter().enumerate() {
        for anchor in [
            *by_patient.entry(n.patient_id.as_str()).or_insert(i),
            *by_provider.entry(n.provider_id.as_str()).or_insert(i),
        ] {
            let (a, b) = (find(&mut parent, anchor), find(&mut parent, i));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut dense: HashMap<usize, usize> = HashMap::new();
    (0..notes.len())
        .map(|i| {
            let root = find(&mut parent, i);
            let next = dense.len();
            *dense.entry(root).or_insert(next)
        })
        .collect()
}

/// Fails if any patient or provider id is shared between the two sides.
pub fn check_disjoint<'a>(
    train: impl IntoIterator<Item = &'a Note>,
    test: impl IntoIterator<Item = &'a Note>,
) -> Result<()> {
    let mut patients = HashSet::new();
    let mut providers = HashSet::new();
    for n in train {
        patients.insert(n.patient_id.as_str());
        providers.insert(n.provider_id.as_str());
    }
    for n in test {
        if patients.contains(n.patient_id.as_str()) {
            return Err(Error::Contamination {
                key: "patient_id",
                value: n.patient_id.clone(),
            });
        }
        if providers.contains(n.provider_id.as_str()) {
            return Err(Error::Contamination {
                key: "provider_id",
                value: n.provider_id.clone(),
            });
        }
    }
    Ok(())
}

/// Splits into `(train, test)` so that no patient and no provider straddles
/// the two sides.
///
/// Whole contamination groups are shuffled with `seed` and moved to the test
/// side until it reaches `round(test_fraction * len)` notes. Both sides are
/// always non-empty and keep load order.
pub fn split_disjoint(corpus: &Corpus, test_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let notes = corpus.notes();
    let distinct = |f: fn(&Note) -> &str| notes.iter().map(f).collect::<HashSet<_>>().len();
    if distinct(|n| &n.patient_id) < 2 || distinct(|n| &n.provider_id) < 2 {
        return Err(Error::InsufficientGroups);
    }
    let groups = contamination_groups(notes);
    let n_groups = groups.iter().max().map_or(0, |g| g + 1);
    if n_groups < 2 {
        return Err(Error::UnsatisfiableSplit);
    }
    let mut sizes = vec![0usize; n_groups];
    for &g in &groups {
        sizes[g] += 1;
    }

    let mut order: Vec<usize> = (0..n_groups).collect();
    order.shuffle(&mut seed::rng(seed::derive(seed, "split_disjoint")));

    let target = ((test_fraction * notes.len() as f64).round() as usize).max(1);
    let mut in_test = vec![false; n_groups];
    let mut test_size = 0;
    // The last group is never taken, so train stays non-empty.
    for &g in &order[..n_groups - 1] {
        if test_size >= target {
            break;
        }
        in_test[g] = true;
        test_size += sizes[g];
    }

    let mut train = Vec::with_capacity(notes.len() - test_size);
    let mut test = Vec::with_capacity(test_size);
    for (n, &g) in notes.iter().zip(&groups) {
        if in_test[g] {
            test.push(n.clone());
        } else {
            train.push(n.clone());
        }
    }
    check_disjoint(&train, &test)?;
    Ok((Corpus { notes: train }, Corpus { notes: test }))
}
