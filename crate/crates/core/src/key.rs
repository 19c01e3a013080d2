//! Key-signature estimation, circle-of-fifths distance, transposition to
//! the signature without accidentals, and Roman-numeral rendering.
//!
//! Each pitched class belongs diatonically to a handful of major scales.
//! A song's estimate is the signature whose scale collects the most beats
//! over all of its chords; diminished7 and no-chord events vote for
//! nothing.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chord_syntax::PitchClass;
use crate::classes::{reduce_song, ChordClass, ChordClassSequence, ChordType};
use crate::corpus::{Beats, Corpus, Song};
use crate::error::{Error, Result};

const MAJOR_NAMES: [&str; 15] = ["Cb", "Gb", "Db", "Ab", "Eb", "Bb", "F", "C", "G", "D", "A", "E", "B", "F#", "C#"];

/// A key signature as a count of accidentals, negative for flats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KeySignature(i8);

impl KeySignature {
    pub const NATURAL: KeySignature = KeySignature(0);

    pub fn new(accidentals: i8) -> Result<Self> {
        if (-7..=7).contains(&accidentals) {
            Ok(KeySignature(accidentals))
        } else {
            Err(Error::InvalidParameter(format!("key signature {accidentals} outside [-7, 7]")))
        }
    }

    /// Signature of the major key on `root`, spelled with at most six
    /// accidentals; the tritone key is spelled with six flats.
    pub fn from_major_root(root: PitchClass) -> Self {
        let acc = (root.value() as i32 * 7).rem_euclid(12);
        KeySignature(if acc > 5 { acc - 12 } else { acc } as i8)
    }

    pub fn accidentals(self) -> i8 {
        self.0
    }

    /// Tonic of the major scale with this signature.
    pub fn major_root(self) -> PitchClass {
        PitchClass::new(self.0 as i32 * 7)
    }

    /// Same scale, spelled in `[-6, 5]`.
    pub fn canonical(self) -> Self {
        KeySignature::from_major_root(self.major_root())
    }

    pub fn name(self) -> &'static str {
        MAJOR_NAMES[(self.0 + 7) as usize]
    }
}

impl fmt::Display for KeySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Major keys whose diatonic seventh chords include `class`.
pub fn diatonic_keys(class: ChordClass) -> Result<Vec<KeySignature>> {
    let ChordClass::Pitched { ty, root } = class else {
        return Err(Error::NonPitchedClass(class));
    };
    let offsets: &[i32] = match ty {
        ChordType::Major7 => &[0, 7],
        ChordType::Dominant7 => &[5],
        ChordType::Minor7 => &[-2, -4, -9],
        ChordType::HalfDiminished => &[1],
        ChordType::Diminished7 => &[],
    };
    let mut keys: Vec<KeySignature> =
        offsets.iter().map(|&o| KeySignature::from_major_root(root.transpose(o))).collect();
    keys.sort();
    Ok(keys)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyEstimate {
    pub song_id: String,
    /// Signatures tied for the most beats, ordered flat to sharp.
    pub winners: Vec<KeySignature>,
    #[serde(serialize_with = "serialize_tally")]
    pub beat_tally: BTreeMap<KeySignature, Beats>,
    pub ambiguous: bool,
}

fn serialize_tally<S: serde::Serializer>(
    tally: &BTreeMap<KeySignature, Beats>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(tally.len()))?;
    for (k, v) in tally {
        map.serialize_entry(k.name(), &format!("{v}"))?;
    }
    map.end()
}

pub fn estimate_key(seq: &ChordClassSequence) -> Result<KeyEstimate> {
    let mut tally: BTreeMap<KeySignature, Beats> = BTreeMap::new();
    for (class, beats) in seq.iter() {
        if !class.is_pitched() {
            continue;
        }
        for key in diatonic_keys(class)? {
            *tally.entry(key).or_insert_with(|| Beats::from_integer(0)) += beats;
        }
    }
    let best = tally.values().max().copied().ok_or_else(|| Error::NoTonalContent(seq.song_id.clone()))?;
    let winners: Vec<KeySignature> = tally.iter().filter(|(_, &b)| b == best).map(|(&k, _)| k).collect();
    Ok(KeyEstimate { song_id: seq.song_id.clone(), ambiguous: winners.len() > 1, winners, beat_tally: tally })
}

/// Picks the signature used for transposition. An unambiguous estimate
/// always wins; a tie defers to the declared signature, or failing that to
/// the winner with fewest accidentals (flats before sharps).
pub fn resolve_key(est: &KeyEstimate, declared: Option<KeySignature>) -> KeySignature {
    if !est.ambiguous {
        return est.winners[0];
    }
    if let Some(declared) = declared {
        return declared;
    }
    *est.winners
        .iter()
        .min_by_key(|k| (k.accidentals().abs(), k.accidentals()))
        .expect("estimate has at least one winner")
}

/// Signed steps around the circle of fifths from `a` to `b`: positive is
/// sharpward, negative flatward. Enharmonic signatures are at distance 0
/// and the result lies in `[-6, 5]`.
pub fn fifths_distance(a: KeySignature, b: KeySignature) -> i32 {
    let d = (b.accidentals() as i32 - a.accidentals() as i32).rem_euclid(12);
    if d > 5 {
        d - 12
    } else {
        d
    }
}

/// `"0"`, `"1♭"`, `"2♯"`, ...
pub fn distance_label(distance: i32) -> String {
    match distance {
        0 => "0".to_string(),
        d if d < 0 => format!("{}♭", -d),
        d => format!("{d}♯"),
    }
}

/// Moves every pitched root so that `from` becomes the natural signature.
pub fn transpose(seq: &ChordClassSequence, from: KeySignature) -> ChordClassSequence {
    let shift = -(from.major_root().value() as i32);
    ChordClassSequence {
        song_id: seq.song_id.clone(),
        classes: seq.classes.iter().map(|c| c.transpose(shift)).collect(),
        beats: seq.beats.clone(),
    }
}

/// Roman numeral of a pitched class already transposed to C, e.g. `iim`.
pub fn roman_numeral(class: ChordClass) -> Result<String> {
    if !class.is_pitched() {
        return Err(Error::NonPitchedClass(class));
    }
    Ok(class.label())
}

/// Roman numerals joined with `-`.
pub fn roman_sequence(classes: &[ChordClass]) -> Result<String> {
    let parts = classes.iter().map(|&c| roman_numeral(c)).collect::<Result<Vec<_>>>()?;
    Ok(parts.join("-"))
}

/// Output of the full per-song pipeline: reduction, estimation, key
/// resolution and transposition to the natural signature.
#[derive(Debug, Clone, PartialEq)]
pub struct SongAnalysis {
    pub song_id: String,
    pub reduced: ChordClassSequence,
    /// `None` when the song has no tonal content.
    pub estimate: Option<KeyEstimate>,
    pub key: KeySignature,
    pub transposed: ChordClassSequence,
}

/// Runs the pipeline for one song. A song with no tonal content falls back
/// to its declared key, or to the natural signature when it has none.
pub fn analyze_song(song: &Song) -> SongAnalysis {
    let reduced = reduce_song(song);
    let estimate = estimate_key(&reduced).ok();
    let key = match &estimate {
        Some(est) => resolve_key(est, song.declared_key),
        None => song.declared_key.unwrap_or(KeySignature::NATURAL),
    };
    let transposed = transpose(&reduced, key);
    SongAnalysis { song_id: song.id.clone(), reduced, estimate, key, transposed }
}

pub fn analyze_corpus(corpus: &Corpus) -> Vec<SongAnalysis> {
    use rayon::prelude::*;
    corpus.songs().par_iter().map(analyze_song).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SongKeyReport {
    pub song_id: String,
    pub title: String,
    pub winners: Vec<KeySignature>,
    pub resolved: KeySignature,
    pub declared: Option<KeySignature>,
    pub ambiguous: bool,
    /// Fifths from estimate to declared key; `None` when ambiguous, when
    /// no key is declared, or when the song has no tonal content.
    pub distance: Option<i32>,
}

/// Histogram of estimate-vs-declared distances; ambiguous songs are
/// counted separately and not in `by_distance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub songs: Vec<SongKeyReport>,
    pub by_distance: BTreeMap<i32, usize>,
    pub ambiguous: usize,
    pub no_tonal_content: usize,
    pub total: usize,
}

impl EstimationReport {
    pub fn percent(&self, count: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * count as f64 / self.total as f64
        }
    }

    pub fn agreement(&self) -> usize {
        self.by_distance.get(&0).copied().unwrap_or(0)
    }
}

pub fn song_key_report(song: &Song) -> SongKeyReport {
    let analysis = analyze_song(song);
    let (winners, ambiguous) = match &analysis.estimate {
        Some(est) => (est.winners.clone(), est.ambiguous),
        None => (Vec::new(), false),
    };
    let distance = match (&analysis.estimate, song.declared_key) {
        (Some(est), Some(declared)) if !est.ambiguous => Some(fifths_distance(est.winners[0], declared)),
        _ => None,
    };
    SongKeyReport {
        song_id: song.id.clone(),
        title: song.title.clone(),
        winners,
        resolved: analysis.key,
        declared: song.declared_key,
        ambiguous,
        distance,
    }
}

/// Compares estimates against declared keys over a whole corpus. Every
/// song must declare a key.
pub fn evaluate_estimation(corpus: &Corpus) -> Result<EstimationReport> {
    use rayon::prelude::*;
    if let Some(song) = corpus.songs().iter().find(|s| s.declared_key.is_none()) {
        return Err(Error::MissingDeclaredKey(song.id.clone()));
    }
    let songs: Vec<SongKeyReport> = corpus.songs().par_iter().map(song_key_report).collect();
    let mut by_distance = BTreeMap::new();
    let mut ambiguous = 0;
    let mut no_tonal_content = 0;
    for report in &songs {
        if report.ambiguous {
            ambiguous += 1;
        } else if let Some(d) = report.distance {
            *by_distance.entry(d).or_insert(0) += 1;
        } else {
            no_tonal_content += 1;
        }
    }
    Ok(EstimationReport { total: songs.len(), songs, by_distance, ambiguous, no_tonal_content })
}

/// Classes sounding in each measure, in order. A chord held across a bar
/// line is listed in every measure it touches.
pub fn measure_grid(seq: &ChordClassSequence, beats_per_measure: u32) -> Vec<Vec<ChordClass>> {
    let bar = Beats::from_integer(beats_per_measure as u64);
    let total: Beats = seq.beats.iter().copied().sum();
    let measures = (total / bar).ceil().to_integer() as usize;
    let mut grid = vec![Vec::new(); measures];
    let mut start = Beats::from_integer(0);
    for (class, beats) in seq.iter() {
        let end = start + beats;
        let first = (start / bar).floor().to_integer() as usize;
        let last = ((end / bar).ceil().to_integer() as usize).max(first + 1);
        for measure in grid.iter_mut().take(last).skip(first) {
            measure.push(class);
        }
        start = end;
    }
    grid
}
