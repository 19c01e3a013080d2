//! Song corpus: JSON-lines ingestion and chord-category statistics.
//!
//! One song per line:
//!
//! ```text
//! {"id": "blue-bossa", "title": "Blue Bossa", "key_signature": -3,
//!  "beats_per_measure": 4, "chords": [["Cm7", 4, 1], ["Fm7", 4, 1]]}
//! ```
//!
//! Each chord is `[symbol, beats_numerator, beats_denominator]`. The key
//! signature counts accidentals (negative for flats) and may be `null`.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::chord_syntax::{parse_chord, Category, ParsedChord};
use crate::error::{Error, Result};
use crate::key::KeySignature;

/// Durations in beats, kept exact.
pub type Beats = Ratio<u64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ChordEvent {
    pub chord: ParsedChord,
    pub beats: Beats,
}

impl ChordEvent {
    pub fn new(chord: ParsedChord, beats: Beats) -> Self {
        assert!(beats > Beats::from_integer(0), "chord durations must be positive");
        ChordEvent { chord, beats }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Song {
    pub id: String,
    pub title: String,
    pub declared_key: Option<KeySignature>,
    pub beats_per_measure: u32,
    pub events: Vec<ChordEvent>,
}

impl Song {
    pub fn total_beats(&self) -> Beats {
        self.events.iter().map(|e| e.beats).sum()
    }

    /// Serializes the song as one JSONL record (no trailing newline).
    pub fn to_record_line(&self) -> String {
        let record = Record {
            id: self.id.clone(),
            title: self.title.clone(),
            key_signature: self.declared_key.map(|k| k.accidentals() as i64),
            beats_per_measure: self.beats_per_measure as i64,
            chords: self
                .events
                .iter()
                .map(|e| {
                    let symbol = if e.chord.raw.is_empty() { e.chord.render() } else { e.chord.raw.clone() };
                    (symbol, *e.beats.numer() as i64, *e.beats.denom() as i64)
                })
                .collect(),
        };
        serde_json::to_string(&record).expect("record serialization cannot fail")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    songs: Vec<Song>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate song ids.
    pub fn new(songs: Vec<Song>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, song) in songs.iter().enumerate() {
            validate_song(song).map_err(|reason| Error::MalformedRecord { line: i + 1, reason })?;
            if !seen.insert(song.id.as_str()) {
                return Err(Error::MalformedRecord { line: i + 1, reason: format!("duplicate song id `{}`", song.id) });
            }
        }
        Ok(Corpus { songs })
    }

    pub fn songs(&self) -> &[Song] {
        &self.songs
    }

    pub fn len(&self) -> usize {
        self.songs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.songs.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Song> {
        self.songs.iter().find(|s| s.id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.songs.iter().position(|s| s.id == id)
    }

    /// FNV-1a hash over ids, keys and chord events; identifies the corpus a
    /// model was built from.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        for song in &self.songs {
            h.write(song.id.as_bytes());
            h.write(&[0]);
            h.write(&song.declared_key.map_or(99i8, |k| k.accidentals()).to_le_bytes());
            for e in &song.events {
                h.write(e.chord.render().as_bytes());
                h.write(&e.beats.numer().to_le_bytes());
                h.write(&e.beats.denom().to_le_bytes());
            }
            h.write(&[0xff]);
        }
        h.finish()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for song in &self.songs {
            out.push_str(&song.to_record_line());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    title: String,
    key_signature: Option<i64>,
    beats_per_measure: i64,
    chords: Vec<(String, i64, i64)>,
}

fn validate_song(song: &Song) -> std::result::Result<(), String> {
    if song.events.is_empty() {
        return Err(format!("song `{}` has no chords", song.id));
    }
    if song.beats_per_measure == 0 {
        return Err("beats_per_measure must be positive".into());
    }
    if song.events.iter().any(|e| *e.beats.numer() == 0) {
        return Err("chord durations must be positive".into());
    }
    Ok(())
}

fn record_to_song(record: Record, line: usize) -> Result<Song> {
    let malformed = |reason: String| Error::MalformedRecord { line, reason };
    let declared_key = record
        .key_signature
        .map(|k| {
            i8::try_from(k)
                .ok()
                .and_then(|k| KeySignature::new(k).ok())
                .ok_or_else(|| malformed(format!("key_signature {k} outside [-7, 7]")))
        })
        .transpose()?;
    if record.beats_per_measure <= 0 || record.beats_per_measure > u32::MAX as i64 {
        return Err(malformed(format!("beats_per_measure must be positive, got {}", record.beats_per_measure)));
    }
    if record.chords.is_empty() {
        return Err(malformed("chords list is empty".into()));
    }
    let mut events = Vec::with_capacity(record.chords.len());
    for (symbol, num, den) in record.chords {
        if num <= 0 || den <= 0 {
            return Err(malformed(format!("`{symbol}` has non-positive duration {num}/{den}")));
        }
        let chord = parse_chord(&symbol).map_err(|source| Error::BadSymbol { line, source })?;
        events.push(ChordEvent::new(chord, Beats::new(num as u64, den as u64)));
    }
    Ok(Song {
        id: record.id,
        title: record.title,
        declared_key,
        beats_per_measure: record.beats_per_measure as u32,
        events,
    })
}

/// Reads a JSONL corpus from any buffered reader. Blank lines are skipped;
/// errors carry 1-based line numbers.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut songs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let text = line.map_err(|e| Error::MalformedRecord { line: line_no, reason: e.to_string() })?;
        if text.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&text).map_err(|e| Error::MalformedRecord { line: line_no, reason: e.to_string() })?;
        let song = record_to_song(record, line_no)?;
        if !seen.insert(song.id.clone()) {
            return Err(Error::MalformedRecord { line: line_no, reason: format!("duplicate song id `{}`", song.id) });
        }
        songs.push(song);
    }
    Ok(Corpus { songs })
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    read_corpus(BufReader::new(file))
}

/// Chord counts per syntactic category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryStats {
    pub counts: BTreeMap<Category, u64>,
    pub total: u64,
}

impl CategoryStats {
    pub fn count(&self, category: Category) -> u64 {
        self.counts.get(&category).copied().unwrap_or(0)
    }

    /// Share of all chords in percent; 0 for an empty corpus.
    pub fn percent(&self, category: Category) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.count(category) as f64 / self.total as f64
        }
    }

    /// `(category, count, percent)` in table order, including empty rows.
    pub fn rows(&self) -> Vec<(Category, u64, f64)> {
        Category::ALL.iter().map(|&c| (c, self.count(c), self.percent(c))).collect()
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CategoryStats {
    let mut counts: BTreeMap<Category, u64> = Category::ALL.iter().map(|&c| (c, 0)).collect();
    let mut total = 0;
    for event in corpus.songs.iter().flat_map(|s| &s.events) {
        *counts.entry(event.chord.category()).or_default() += 1;
        total += 1;
    }
    CategoryStats { counts, total }
}

pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    pub(crate) fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}
