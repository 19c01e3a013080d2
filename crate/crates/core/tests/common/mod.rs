#![allow(dead_code)]

use std::path::PathBuf;

use contrafact::corpus::read_corpus;
use contrafact::{pitch_name, Corpus, PitchClass};

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/standards.jsonl")
}

pub fn fixture() -> Corpus {
    contrafact::load_corpus(fixture_path()).expect("fixture corpus loads")
}

/// One JSONL record with every chord lasting `beats` beats.
pub fn record(id: &str, key: Option<i8>, chords: &[&str], beats: u64) -> String {
    let chords: Vec<_> = chords.iter().map(|c| serde_json::json!([c, beats, 1])).collect();
    serde_json::json!({
        "id": id,
        "title": id,
        "key_signature": key,
        "beats_per_measure": 4,
        "chords": chords,
    })
    .to_string()
}

pub fn corpus_of(lines: &[String]) -> Corpus {
    read_corpus(lines.join("\n").as_bytes()).expect("corpus parses")
}

pub fn root_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut n = 1;
    while n < b.len() && n < 3 && (b[n] == b'#' || b[n] == b'b') {
        n += 1;
    }
    n
}

fn shift_root(s: &str, semitones: i32) -> String {
    let n = root_len(s);
    let pc = contrafact::parse_chord(&s[..n]).expect("root parses").root;
    format!("{}{}", pitch_name(pc.transpose(semitones), true), &s[n..])
}

/// Moves the root (and slash bass) of a chord symbol by `semitones`.
pub fn transpose_symbol(symbol: &str, semitones: i32) -> String {
    if symbol.starts_with('N') {
        return symbol.to_string();
    }
    symbol
        .split('|')
        .map(|part| match part.split_once('/') {
            Some((upper, bass)) => format!("{}/{}", shift_root(upper, semitones), shift_root(bass, semitones)),
            None => shift_root(part, semitones),
        })
        .collect::<Vec<_>>()
        .join("|")
}

pub fn pc(v: i32) -> PitchClass {
    PitchClass::new(v)
}
