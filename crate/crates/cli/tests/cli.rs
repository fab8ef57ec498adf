use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn clinote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clinote"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, body: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }
}

fn note(id: &str, patient: &str, provider: &str, text: &str, label: &str) -> String {
    format!(
        r#"{{"id":"{id}","patient_id":"{patient}","provider_id":"{provider}","stay_index":1,"hours_since_admission":2.0,"text":"{text}","label":"{label}"}}"#
    )
}

fn separable(w: &Work) -> PathBuf {
    let mut lines = Vec::new();
    for i in 0..20 {
        let (text, label) = if i % 2 == 0 {
            ("CEC et milrinone, civ opérée", "Positive")
        } else {
            ("bronchiolite stable, afébrile", "Negative")
        };
        lines.push(note(&format!("n{i}"), &format!("p{i}"), &format!("d{i}"), text, label));
    }
    w.write("toy.jsonl", &(lines.join("\n") + "\n"))
}

#[test]
fn preprocess_empty_input_gives_empty_output() {
    let w = Work::new();
    let input = w.write("empty.jsonl", "");
    let out = clinote(&["preprocess", "--input", s(&input), "--out", s(&w.path("tok.jsonl"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(w.read("tok.jsonl"), "");
}

#[test]
fn preprocess_missing_input_is_an_io_error() {
    let w = Work::new();
    let out = clinote(&["preprocess", "--input", s(&w.path("nope.jsonl")), "--out", s(&w.path("o"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn keep_numeric_switch() {
    let w = Work::new();
    let input = w.write("n.jsonl", &(note("a", "p", "d", "dose 1200 mg", "Positive") + "\n"));
    let run = |extra: &[&str], name: &str| {
        let mut args = vec!["preprocess", "--input", s(&input)];
        let out_path = w.path(name);
        args.extend(["--out", s(&out_path)]);
        args.extend(extra);
        assert_eq!(code(&clinote(&args)), 0);
        w.read(name)
    };
    assert!(!run(&[], "drop.jsonl").contains("1200"));
    assert!(run(&["--keep-numeric"], "keep.jsonl").contains("\"1200\""));
}

#[test]
fn malformed_record_is_a_domain_error() {
    let w = Work::new();
    let input = w.write("bad.jsonl", "{\"id\": 3}\n");
    let out = clinote(&["preprocess", "--input", s(&input), "--out", s(&w.path("o"))]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn fit_then_predict_recovers_labels() {
    let w = Work::new();
    let toy = separable(&w);
    for model in ["lr", "gnb", "mlp"] {
        for features in ["bow", "tfidf"] {
            let artifact = w.path(&format!("{model}-{features}.json"));
            let mut args = vec!["fit", "--input", s(&toy), "--out", s(&artifact), "--model", model, "--features", features];
            if model == "mlp" {
                args.extend(["--clf-lr", "0.05"]);
            }
            let out = clinote(&args);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            let preds = w.path("preds.csv");
            let out = clinote(&["predict", "--model", s(&artifact), "--input", s(&toy), "--out", s(&preds)]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            let body = w.read("preds.csv");
            let mut lines = body.lines();
            assert_eq!(lines.next(), Some("id,probability,label"));
            for (i, line) in lines.enumerate() {
                let want = if i % 2 == 0 { "Positive" } else { "Negative" };
                assert!(line.ends_with(want), "{model}/{features}: {line}");
            }
        }
    }
}

#[test]
fn predict_errors() {
    let w = Work::new();
    let toy = separable(&w);
    let preds = w.path("p.csv");
    let missing = clinote(&["predict", "--model", s(&w.path("none.json")), "--input", s(&toy), "--out", s(&preds)]);
    assert_eq!(code(&missing), 2);

    let artifact = w.path("m.json");
    assert_eq!(code(&clinote(&["fit", "--input", s(&toy), "--out", s(&artifact)])), 0);
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&artifact).unwrap()).unwrap();
    json["version"] = 999.into();
    std::fs::write(&artifact, json.to_string()).unwrap();
    let out = clinote(&["predict", "--model", s(&artifact), "--input", s(&toy), "--out", s(&preds)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("999"));
}

#[test]
fn fit_rejects_unlabeled_and_oversized_k() {
    let w = Work::new();
    let toy = separable(&w);
    let out = clinote(&["fit", "--input", s(&toy), "--out", s(&w.path("m.json")), "--select-k", "1000"]);
    assert_eq!(code(&out), 1);
    let unlabeled = w.write("u.jsonl", &(note("a", "p", "d", "cec", "") + "\n"));
    let out = clinote(&["fit", "--input", s(&unlabeled), "--out", s(&w.path("m.json"))]);
    assert_eq!(code(&out), 1);
}

fn small_grid(w: &Work, csv: &str, extra: &[&str]) -> Output {
    let notes = w.path("notes.jsonl");
    if !notes.exists() {
        assert_eq!(code(&clinote(&["synth", "--n", "120", "--seed", "3", "--out", s(&notes)])), 0);
    }
    let out_path = w.path(csv);
    let mut args = vec!["grid", "--input", s(&notes), "--out", s(&out_path), "--dim", "8", "--epochs", "1"];
    args.extend(["--hidden", "8", "--clf-epochs", "20"]);
    args.extend(extra);
    clinote(&args)
}

#[test]
fn grid_reports_are_complete_and_repeatable() {
    let w = Work::new();
    let a = small_grid(&w, "a.csv", &["--threads", "1"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = small_grid(&w, "b.csv", &["--threads", "3"]);
    assert_eq!(code(&b), 0);
    assert_eq!(w.read("a.csv"), w.read("b.csv"));
    assert_eq!(w.read("a.txt"), w.read("b.txt"));
    assert_eq!(w.read("a.csv").lines().count(), 19);
    assert_eq!(String::from_utf8_lossy(&a.stdout), w.read("a.txt"));
}

#[test]
fn grid_validation_errors() {
    let w = Work::new();
    assert_eq!(code(&small_grid(&w, "g.csv", &["--select-k", "0"])), 1);
    assert_eq!(code(&small_grid(&w, "g.csv", &["--k", "1"])), 1);
    assert_eq!(code(&small_grid(&w, "g.csv", &["--threshold", "1.5"])), 1);
}

#[test]
fn per_note_folds_are_an_explicit_opt_out() {
    let w = Work::new();
    let out = small_grid(&w, "g.csv", &["--no-group-folds"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("straddle"));
}

#[test]
fn config_file_precedence() {
    let w = Work::new();
    let out = w.path("s.jsonl");
    let cfg = w.write("c.json", &format!(r#"{{"n": 30, "seed": 5, "out": "{}"}}"#, s(&out)));
    assert_eq!(code(&clinote(&["--config", s(&cfg), "synth"])), 0);
    assert_eq!(w.read("s.jsonl").lines().count(), 30);
    assert_eq!(code(&clinote(&["synth", "--config", s(&cfg), "--n", "12"])), 0);
    assert_eq!(w.read("s.jsonl").lines().count(), 12);

    let bad = w.write("bad.json", r#"{"nope": 1}"#);
    assert_eq!(code(&clinote(&["--config", s(&bad), "synth"])), 2);
    let not_object = w.write("arr.json", "[1]");
    assert_eq!(code(&clinote(&["--config", s(&not_object), "synth"])), 2);
    assert_eq!(code(&clinote(&["--config", s(&w.path("missing.json")), "synth"])), 2);
}

#[test]
fn synth_csv_round_trips_through_preprocess() {
    let w = Work::new();
    let csv = w.path("notes.csv");
    assert_eq!(code(&clinote(&["synth", "--n", "15", "--out", s(&csv)])), 0);
    assert!(w.read("notes.csv").starts_with("id,patient_id,provider_id"));
    assert_eq!(code(&clinote(&["preprocess", "--input", s(&csv), "--out", s(&w.path("t.jsonl"))])), 0);
    assert_eq!(w.read("t.jsonl").lines().count(), 15);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&clinote(&["fit"])), 2);
    assert_eq!(code(&clinote(&["grid", "--k", "many"])), 2);
    assert_eq!(code(&clinote(&["bogus"])), 2);
}
