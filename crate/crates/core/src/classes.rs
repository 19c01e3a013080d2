//! Reduction of chord symbols to 61 chord classes (5 seventh-chord types
//! on 12 roots, plus no-chord), and the two boundary tokens used when
//! counting co-occurrences.
//!
//! Most families map context-free. Major triads (with or without an
//! added 9th), sus chords and some slash chords depend on the chord that
//! follows, so a song is reduced from its last event backwards: the
//! class of the next event is always settled before it is consulted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chord_syntax::{ChordFamily, ParsedChord, PitchClass};
use crate::corpus::{Beats, ChordEvent, Song};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChordType {
    Major7,
    Minor7,
    Dominant7,
    HalfDiminished,
    Diminished7,
}

impl ChordType {
    pub const ALL: [ChordType; 5] =
        [ChordType::Major7, ChordType::Minor7, ChordType::Dominant7, ChordType::HalfDiminished, ChordType::Diminished7];

    pub fn rank(self) -> usize {
        self as usize
    }

    /// Short suffix used in class labels and Roman numerals.
    pub fn suffix(self) -> &'static str {
        match self {
            ChordType::Major7 => "M",
            ChordType::Minor7 => "m",
            ChordType::Dominant7 => "7",
            ChordType::HalfDiminished => "h",
            ChordType::Diminished7 => "o",
        }
    }

    fn symbol_quality(self) -> &'static str {
        match self {
            ChordType::Major7 => "M7",
            ChordType::Minor7 => "m7",
            ChordType::Dominant7 => "7",
            ChordType::HalfDiminished => "m7b5",
            ChordType::Diminished7 => "o7",
        }
    }
}

/// One of the 63 embedding dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChordClass {
    Pitched { ty: ChordType, root: PitchClass },
    NoChord,
    Start,
    End,
}

pub const CLASS_COUNT: usize = 63;
pub const PITCHED_COUNT: usize = 60;

const NUMERALS: [&str; 12] = ["i", "♭ii", "ii", "♭iii", "iii", "iv", "♭v", "v", "♭vi", "vi", "♭vii", "vii"];

impl ChordClass {
    pub fn pitched(ty: ChordType, root: PitchClass) -> Self {
        ChordClass::Pitched { ty, root }
    }

    /// Canonical index: `type_rank * 12 + root` for pitched classes, then
    /// no-chord = 60, start = 61, end = 62. Persisted models rely on it.
    pub fn index(self) -> usize {
        match self {
            ChordClass::Pitched { ty, root } => ty.rank() * 12 + root.value() as usize,
            ChordClass::NoChord => 60,
            ChordClass::Start => 61,
            ChordClass::End => 62,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            0..=59 => {
                Some(ChordClass::Pitched { ty: ChordType::ALL[index / 12], root: PitchClass::new((index % 12) as i32) })
            }
            60 => Some(ChordClass::NoChord),
            61 => Some(ChordClass::Start),
            62 => Some(ChordClass::End),
            _ => None,
        }
    }

    pub fn all() -> impl Iterator<Item = ChordClass> {
        (0..CLASS_COUNT).map(|i| ChordClass::from_index(i).unwrap())
    }

    pub fn is_pitched(self) -> bool {
        matches!(self, ChordClass::Pitched { .. })
    }

    pub fn root(self) -> Option<PitchClass> {
        match self {
            ChordClass::Pitched { root, .. } => Some(root),
            _ => None,
        }
    }

    pub fn chord_type(self) -> Option<ChordType> {
        match self {
            ChordClass::Pitched { ty, .. } => Some(ty),
            _ => None,
        }
    }

    /// Shifts the root of a pitched class; other classes are unchanged.
    pub fn transpose(self, semitones: i32) -> Self {
        match self {
            ChordClass::Pitched { ty, root } => ChordClass::Pitched { ty, root: root.transpose(semitones) },
            other => other,
        }
    }

    /// Roman-numeral label relative to C (`♭ii7`, `iim`, `<START>`, `NC`).
    pub fn label(self) -> String {
        match self {
            ChordClass::Pitched { ty, root } => format!("{}{}", NUMERALS[root.value() as usize], ty.suffix()),
            ChordClass::NoChord => "NC".to_string(),
            ChordClass::Start => "<START>".to_string(),
            ChordClass::End => "<END>".to_string(),
        }
    }

    /// Parses a label as produced by [`ChordClass::label`]. An ASCII `b`
    /// may stand in for `♭`, and `START`/`END` may omit the brackets.
    pub fn from_label(label: &str) -> Result<Self> {
        let unknown = || Error::UnknownClassLabel(label.to_string());
        let text = label.trim();
        match text {
            "NC" | "N.C." => return Ok(ChordClass::NoChord),
            "<START>" | "START" => return Ok(ChordClass::Start),
            "<END>" | "END" => return Ok(ChordClass::End),
            _ => {}
        }
        let text = text.replace('♭', "b");
        let suffix = text.chars().last().ok_or_else(unknown)?;
        let ty = ChordType::ALL.into_iter().find(|t| t.suffix().starts_with(suffix)).ok_or_else(unknown)?;
        let numeral = &text[..text.len() - suffix.len_utf8()];
        let pos = NUMERALS.iter().position(|n| n.replace('♭', "b") == numeral).ok_or_else(unknown)?;
        Ok(ChordClass::pitched(ty, PitchClass::new(pos as i32)))
    }

    /// A plain chord symbol for this class with the root spelled absolutely,
    /// e.g. `Dm7` for minor7 on D.
    pub fn chord_symbol(self) -> String {
        match self {
            ChordClass::Pitched { ty, root } => format!("{}{}", root, ty.symbol_quality()),
            ChordClass::NoChord => "NC".to_string(),
            ChordClass::Start => "<START>".to_string(),
            ChordClass::End => "<END>".to_string(),
        }
    }
}

impl fmt::Display for ChordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Reduced song: one class per chord event, durations carried along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordClassSequence {
    pub song_id: String,
    pub classes: Vec<ChordClass>,
    pub beats: Vec<Beats>,
}

impl ChordClassSequence {
    pub fn new(song_id: impl Into<String>, classes: Vec<ChordClass>, beats: Vec<Beats>) -> Self {
        assert_eq!(classes.len(), beats.len(), "classes and beats must be parallel");
        assert!(
            classes.iter().all(|c| !matches!(c, ChordClass::Start | ChordClass::End)),
            "boundary tokens are added by consumers"
        );
        ChordClassSequence { song_id: song_id.into(), classes, beats }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ChordClass, Beats)> + '_ {
        self.classes.iter().copied().zip(self.beats.iter().copied())
    }
}

fn is_major_or_minor(class: Option<ChordClass>, root: PitchClass) -> bool {
    matches!(
        class,
        Some(ChordClass::Pitched { ty: ChordType::Major7 | ChordType::Minor7, root: r }) if r == root
    )
}

/// A major triad resolving down a fifth to a major7 or minor7 class acts as
/// a dominant; otherwise it is a major7.
pub fn classify_major_triad(triad_root: PitchClass, next: Option<ChordClass>) -> ChordClass {
    if is_major_or_minor(next, triad_root.transpose(5)) {
        ChordClass::pitched(ChordType::Dominant7, triad_root)
    } else {
        ChordClass::pitched(ChordType::Major7, triad_root)
    }
}

/// A sus chord followed by the dominant7 on the same root becomes the
/// minor7 a fifth above (G7sus4 G7 -> Dm7 G7); otherwise it is a dominant7.
pub fn classify_sus(sus_root: PitchClass, next: Option<ChordClass>) -> ChordClass {
    match next {
        Some(ChordClass::Pitched { ty: ChordType::Dominant7, root }) if root == sus_root => {
            ChordClass::pitched(ChordType::Minor7, sus_root.transpose(7))
        }
        _ => ChordClass::pitched(ChordType::Dominant7, sus_root),
    }
}

fn classify_plain(chord: &ParsedChord, next: Option<ChordClass>) -> ChordClass {
    use ChordFamily::*;
    let root = chord.root;
    match chord.family {
        Major7 | Major6 => ChordClass::pitched(ChordType::Major7, root),
        Dominant7 | AugmentedTriad => ChordClass::pitched(ChordType::Dominant7, root),
        Minor7 | MinorMajor7 | Minor6 | MinorTriad => ChordClass::pitched(ChordType::Minor7, root),
        Minor7Flat5 => ChordClass::pitched(ChordType::HalfDiminished, root),
        Diminished7 | DiminishedTriad => ChordClass::pitched(ChordType::Diminished7, root),
        MajorTriad | MajorTriadAdd9 => classify_major_triad(root, next),
        Sus => classify_sus(root, next),
        Power | NoChord => ChordClass::NoChord,
    }
}

/// Slash chords: an inversion (bass is a chord tone) classifies as the
/// chord above the slash; a minor chord over the note a fifth below its
/// root (Dm7/G) is a sus voicing on the bass; anything else treats the
/// bass as a colour tone and classifies the upper chord.
pub fn classify_slash(chord: &ParsedChord, next: Option<ChordClass>) -> ChordClass {
    let body = chord.without_bass();
    let Some(bass) = chord.bass else {
        return classify_plain(&body, next);
    };
    if body.tones().contains(&bass) {
        return classify_plain(&body, next);
    }
    let minor_family = matches!(
        body.family,
        ChordFamily::Minor7 | ChordFamily::MinorTriad | ChordFamily::Minor6 | ChordFamily::MinorMajor7
    );
    if minor_family && body.root == bass.transpose(7) {
        return classify_sus(bass, next);
    }
    classify_plain(&body, next)
}

/// Class of one chord given the (already reduced) class of the chord after
/// it. Polychords are classified by their lower structure.
pub fn classify(chord: &ParsedChord, next: Option<ChordClass>) -> ChordClass {
    if chord.bass.is_some() {
        classify_slash(chord, next)
    } else {
        classify_plain(chord, next)
    }
}

/// Reduces a list of chord events, resolving right to left.
pub fn reduce_events(events: &[ChordEvent]) -> Vec<ChordClass> {
    let mut out = vec![ChordClass::NoChord; events.len()];
    let mut next = None;
    for (i, event) in events.iter().enumerate().rev() {
        let class = classify(&event.chord, next);
        out[i] = class;
        next = Some(class);
    }
    out
}

pub fn reduce_song(song: &Song) -> ChordClassSequence {
    ChordClassSequence::new(song.id.clone(), reduce_events(&song.events), song.events.iter().map(|e| e.beats).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord_syntax::parse_chord;

    fn pc(v: i32) -> PitchClass {
        PitchClass::new(v)
    }

    fn cls(ty: ChordType, root: i32) -> ChordClass {
        ChordClass::pitched(ty, pc(root))
    }

    fn reduce(symbols: &[&str]) -> Vec<ChordClass> {
        let events: Vec<ChordEvent> =
            symbols.iter().map(|s| ChordEvent::new(parse_chord(s).unwrap(), Beats::from_integer(4))).collect();
        reduce_events(&events)
    }

    use ChordType::*;

    #[test]
    fn index_contract() {
        assert_eq!(cls(Major7, 0).index(), 0);
        assert_eq!(cls(Minor7, 2).index(), 14);
        assert_eq!(cls(Dominant7, 7).index(), 31);
        assert_eq!(cls(HalfDiminished, 11).index(), 47);
        assert_eq!(cls(Diminished7, 0).index(), 48);
        assert_eq!(ChordClass::NoChord.index(), 60);
        assert_eq!(ChordClass::Start.index(), 61);
        assert_eq!(ChordClass::End.index(), 62);
        let all: Vec<_> = ChordClass::all().collect();
        assert_eq!(all.len(), 63);
        for (i, c) in all.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
        assert_eq!(ChordClass::from_index(63), None);
    }

    #[test]
    fn labels_round_trip() {
        for c in ChordClass::all() {
            assert_eq!(ChordClass::from_label(&c.label()).unwrap(), c);
        }
        assert_eq!(ChordClass::from_label("bii7").unwrap(), cls(Dominant7, 1));
        assert_eq!(ChordClass::from_label("iim").unwrap(), cls(Minor7, 2));
        assert_eq!(cls(Dominant7, 1).label(), "♭ii7");
        assert!(ChordClass::from_label("bi7").is_err());
        assert!(ChordClass::from_label("iix").is_err());
        assert!(ChordClass::from_label("").is_err());
    }

    #[test]
    fn context_free_mappings() {
        assert_eq!(reduce(&["Cm9"]), vec![cls(Minor7, 0)]);
        assert_eq!(reduce(&["C6"]), vec![cls(Major7, 0)]);
        assert_eq!(reduce(&["CmM7"]), vec![cls(Minor7, 0)]);
        assert_eq!(reduce(&["C5"]), vec![ChordClass::NoChord]);
        assert_eq!(reduce(&["Caug"]), vec![cls(Dominant7, 0)]);
        assert_eq!(reduce(&["Cm6"]), vec![cls(Minor7, 0)]);
        assert_eq!(reduce(&["Cdim"]), vec![cls(Diminished7, 0)]);
        assert_eq!(reduce(&["Cm"]), vec![cls(Minor7, 0)]);
    }

    #[test]
    fn sus_followed_by_dominant() {
        assert_eq!(reduce(&["G7sus4", "G7"]), vec![cls(Minor7, 2), cls(Dominant7, 7)]);
        assert_eq!(reduce(&["G7sus4", "C"]), vec![cls(Dominant7, 7), cls(Major7, 0)]);
        // the following G9 only becomes dominant7 after reduction
        assert_eq!(reduce(&["Gsus", "G9"]), vec![cls(Minor7, 2), cls(Dominant7, 7)]);
    }

    #[test]
    fn major_triad_rule() {
        assert_eq!(classify_major_triad(pc(7), Some(cls(Major7, 0))), cls(Dominant7, 7));
        assert_eq!(classify_major_triad(pc(7), Some(cls(Minor7, 0))), cls(Dominant7, 7));
        assert_eq!(classify_major_triad(pc(7), Some(cls(Dominant7, 0))), cls(Major7, 7));
        assert_eq!(classify_major_triad(pc(0), None), cls(Major7, 0));
        // chained: G -> C -> F, each resolving down a fifth to a major
        assert_eq!(reduce(&["G", "C", "FM7"]), vec![cls(Major7, 7), cls(Dominant7, 0), cls(Major7, 5)]);
        assert_eq!(reduce(&["Gadd9", "Cm7"]), vec![cls(Dominant7, 7), cls(Minor7, 0)]);
    }

    #[test]
    fn sus_rule() {
        assert_eq!(classify_sus(pc(7), Some(cls(Dominant7, 7))), cls(Minor7, 2));
        assert_eq!(classify_sus(pc(7), Some(cls(Major7, 0))), cls(Dominant7, 7));
        assert_eq!(classify_sus(pc(7), None), cls(Dominant7, 7));
    }

    #[test]
    fn slash_rule() {
        let c_over_g = parse_chord("C/G").unwrap();
        assert_eq!(classify_slash(&c_over_g, None), cls(Major7, 0));
        let dm7_g = parse_chord("Dm7/G").unwrap();
        assert_eq!(classify_slash(&dm7_g, Some(cls(Dominant7, 7))), cls(Minor7, 2));
        assert_eq!(classify_slash(&dm7_g, None), cls(Dominant7, 7));
        let eb_f = parse_chord("EbM7/F").unwrap();
        assert_eq!(classify_slash(&eb_f, None), cls(Major7, 3));
        // inversion of a triad still applies the dominant-function test
        let g_b = parse_chord("G/B").unwrap();
        assert_eq!(classify_slash(&g_b, Some(cls(Major7, 0))), cls(Dominant7, 7));
    }

    #[test]
    fn polychord_uses_lower_structure() {
        assert_eq!(reduce(&["D|C7"]), vec![cls(Dominant7, 0)]);
        assert_eq!(reduce(&["D|G", "CM7"]), vec![cls(Dominant7, 7), cls(Major7, 0)]);
        assert_eq!(reduce(&["Eb|Gsus", "G7"]), vec![cls(Minor7, 2), cls(Dominant7, 7)]);
    }

    #[test]
    fn class_symbols_reparse_to_same_class() {
        for c in ChordClass::all().filter(|c| c.is_pitched() || *c == ChordClass::NoChord) {
            let chord = parse_chord(&c.chord_symbol()).unwrap();
            assert_eq!(classify(&chord, None), c, "{}", c.chord_symbol());
        }
    }
}
