//! Chord-symbol grammar.
//!
//! Symbols look like `C`, `Ebm7`, `F#m7b5`, `Bb7#9`, `G7sus4`, `Dm7/G` or
//! `D|C7` (polychord, upper structure left of the bar). `NC` is the
//! no-chord symbol. Parsing is purely syntactic: a [`ParsedChord`] keeps
//! the chord family as written, and the reduction to chord classes
//! happens in [`crate::classes`].
//!
//! Quality and extension tokens are read greedily (longest match first),
//! so `m7b5` is a half-diminished quality rather than `m7` + `b5`. Roots
//! take up to two accidentals, which means `Cb9` is a C-flat ninth chord.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ChordError;

const SHARP_NAMES: [&str; 12] = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];
const FLAT_NAMES: [&str; 12] = ["C", "Db", "D", "Eb", "E", "F", "Gb", "G", "Ab", "A", "Bb", "B"];

/// A pitch class, C = 0 through B = 11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PitchClass(u8);

impl PitchClass {
    pub const C: PitchClass = PitchClass(0);

    /// Reduces any integer semitone value modulo 12.
    pub fn new(semitones: i32) -> Self {
        PitchClass(semitones.rem_euclid(12) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn transpose(self, semitones: i32) -> Self {
        PitchClass::new(self.0 as i32 + semitones)
    }

    /// Upward interval from `self` to `other`, in `0..12`.
    pub fn interval_to(self, other: PitchClass) -> u8 {
        (other.0 + 12 - self.0) % 12
    }

    pub fn all() -> impl Iterator<Item = PitchClass> {
        (0..12).map(PitchClass)
    }
}

impl fmt::Display for PitchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(pitch_name(*self, true))
    }
}

/// Canonical spelling of a pitch class.
pub fn pitch_name(pc: PitchClass, prefer_flats: bool) -> &'static str {
    if prefer_flats {
        FLAT_NAMES[pc.0 as usize]
    } else {
        SHARP_NAMES[pc.0 as usize]
    }
}

/// Chord family as written, before any reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChordFamily {
    Major7,
    Dominant7,
    Minor7,
    Minor7Flat5,
    Diminished7,
    MajorTriad,
    MajorTriadAdd9,
    MinorTriad,
    DiminishedTriad,
    AugmentedTriad,
    Sus,
    Power,
    NoChord,
    MinorMajor7,
    Major6,
    Minor6,
}

impl ChordFamily {
    /// Core chord tones as semitone offsets from the root. Extensions are
    /// not included.
    pub fn chord_tones(self) -> &'static [u8] {
        use ChordFamily::*;
        match self {
            Major7 => &[0, 4, 7, 11],
            Dominant7 => &[0, 4, 7, 10],
            Minor7 => &[0, 3, 7, 10],
            Minor7Flat5 => &[0, 3, 6, 10],
            Diminished7 => &[0, 3, 6, 9],
            MajorTriad => &[0, 4, 7],
            MajorTriadAdd9 => &[0, 2, 4, 7],
            MinorTriad => &[0, 3, 7],
            DiminishedTriad => &[0, 3, 6],
            AugmentedTriad => &[0, 4, 8],
            Sus => &[0, 5, 7],
            Power => &[0, 7],
            NoChord => &[],
            MinorMajor7 => &[0, 3, 7, 11],
            Major6 => &[0, 4, 7, 9],
            Minor6 => &[0, 3, 7, 9],
        }
    }

    fn quality_str(self) -> &'static str {
        use ChordFamily::*;
        match self {
            Major7 => "M7",
            Dominant7 => "7",
            Minor7 => "m7",
            Minor7Flat5 => "m7b5",
            Diminished7 => "o7",
            MajorTriad => "",
            MajorTriadAdd9 => "add9",
            MinorTriad => "m",
            DiminishedTriad => "o",
            AugmentedTriad => "+",
            Sus => "",
            Power => "5",
            NoChord => "NC",
            MinorMajor7 => "mM7",
            Major6 => "6",
            Minor6 => "m6",
        }
    }
}

/// Extension, alteration or suspension token attached to a chord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Extension {
    /// The `7` in `G7sus4`; only used on sus chords.
    Seventh,
    /// A natural fifth written after the quality (`A55`).
    Five,
    Flat5,
    Sharp5,
    Flat9,
    Nine,
    Sharp9,
    Flat11,
    Eleven,
    Sharp11,
    Flat13,
    Thirteen,
    Sharp13,
    /// `add9` on a minor triad (`Cmadd9`).
    Add9,
    Sus2,
    Sus4,
}

impl Extension {
    pub fn token(self) -> &'static str {
        use Extension::*;
        match self {
            Seventh => "7",
            Five => "5",
            Flat5 => "b5",
            Sharp5 => "#5",
            Flat9 => "b9",
            Nine => "9",
            Sharp9 => "#9",
            Flat11 => "b11",
            Eleven => "11",
            Sharp11 => "#11",
            Flat13 => "b13",
            Thirteen => "13",
            Sharp13 => "#13",
            Add9 => "add9",
            Sus2 => "sus2",
            Sus4 => "sus4",
        }
    }

    fn is_natural_upper(self) -> bool {
        matches!(self, Extension::Nine | Extension::Eleven | Extension::Thirteen)
    }

    fn is_alteration(self) -> bool {
        use Extension::*;
        matches!(self, Flat5 | Sharp5 | Flat9 | Sharp9 | Flat11 | Sharp11 | Flat13 | Sharp13)
    }
}

/// The syntactic categories used for corpus statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Major7,
    Dominant7,
    Minor7,
    Minor7Flat5,
    Diminished7,
    MajorTriad,
    MajorTriadAdd9,
    MinorTriad,
    DiminishedTriad,
    AugmentedTriad,
    Slash,
    Sus,
    NoChord,
    Power,
    Polychord,
}

impl Category {
    pub const ALL: [Category; 15] = [
        Category::Major7,
        Category::Dominant7,
        Category::Minor7,
        Category::Minor7Flat5,
        Category::Diminished7,
        Category::MajorTriad,
        Category::MajorTriadAdd9,
        Category::MinorTriad,
        Category::DiminishedTriad,
        Category::AugmentedTriad,
        Category::Slash,
        Category::Sus,
        Category::NoChord,
        Category::Power,
        Category::Polychord,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::Major7 => "major7",
            Category::Dominant7 => "dominant7",
            Category::Minor7 => "minor7",
            Category::Minor7Flat5 => "minor7b5",
            Category::Diminished7 => "diminished7",
            Category::MajorTriad => "major triad",
            Category::MajorTriadAdd9 => "major triad add9",
            Category::MinorTriad => "minor triad",
            Category::DiminishedTriad => "diminished triad",
            Category::AugmentedTriad => "augmented triad",
            Category::Slash => "slash chord",
            Category::Sus => "sus chord",
            Category::NoChord => "no chord",
            Category::Power => "power chord",
            Category::Polychord => "polychord",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Structured form of a chord symbol.
///
/// For a polychord the chord's own fields describe the lower structure and
/// `upper` holds the chord stacked above it. Equality ignores `raw`, so
/// two spellings of the same chord compare equal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParsedChord {
    pub root: PitchClass,
    pub family: ChordFamily,
    pub extensions: BTreeSet<Extension>,
    pub bass: Option<PitchClass>,
    pub upper: Option<Box<ParsedChord>>,
    pub raw: String,
}

impl PartialEq for ParsedChord {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
            && self.family == other.family
            && self.extensions == other.extensions
            && self.bass == other.bass
            && self.upper == other.upper
    }
}

impl Eq for ParsedChord {}

impl ParsedChord {
    pub fn no_chord() -> Self {
        ParsedChord {
            root: PitchClass::C,
            family: ChordFamily::NoChord,
            extensions: BTreeSet::new(),
            bass: None,
            upper: None,
            raw: "NC".to_string(),
        }
    }

    pub fn is_no_chord(&self) -> bool {
        self.family == ChordFamily::NoChord
    }

    /// Table-style category; structural markers (polychord, slash, sus,
    /// power, no-chord) take precedence over the written quality. Sixth
    /// chords and minor-major sevenths count as 7th-chord variants.
    pub fn category(&self) -> Category {
        use ChordFamily::*;
        if self.upper.is_some() {
            return Category::Polychord;
        }
        if self.bass.is_some() {
            return Category::Slash;
        }
        match self.family {
            Sus => Category::Sus,
            Power => Category::Power,
            NoChord => Category::NoChord,
            Major7 | Major6 => Category::Major7,
            Dominant7 => Category::Dominant7,
            Minor7 | Minor6 | MinorMajor7 => Category::Minor7,
            Minor7Flat5 => Category::Minor7Flat5,
            Diminished7 => Category::Diminished7,
            MajorTriad => Category::MajorTriad,
            MajorTriadAdd9 => Category::MajorTriadAdd9,
            MinorTriad => Category::MinorTriad,
            DiminishedTriad => Category::DiminishedTriad,
            AugmentedTriad => Category::AugmentedTriad,
        }
    }

    /// The chord with any bass note and upper structure dropped.
    pub fn without_bass(&self) -> ParsedChord {
        ParsedChord { bass: None, upper: None, ..self.clone() }
    }

    /// Pitch classes of the core chord tones (no extensions, no bass).
    pub fn tones(&self) -> Vec<PitchClass> {
        let mut tones: Vec<PitchClass> =
            self.family.chord_tones().iter().map(|&i| self.root.transpose(i as i32)).collect();
        if self.family == ChordFamily::Sus {
            if self.extensions.contains(&Extension::Sus2) {
                tones[1] = self.root.transpose(2);
            }
            if self.extensions.contains(&Extension::Seventh) {
                tones.push(self.root.transpose(10));
            }
        }
        tones
    }

    /// Canonical symbol. Parsing it yields a chord equal to `self`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(upper) = &self.upper {
            out.push_str(&upper.render());
            out.push('|');
        }
        if self.family == ChordFamily::NoChord {
            out.push_str("NC");
            return out;
        }
        out.push_str(pitch_name(self.root, true));
        if self.family == ChordFamily::Sus {
            if self.extensions.contains(&Extension::Seventh) {
                out.push('7');
            }
            // sus token first: `Ebb9sus4` would read as an E double-flat root
            if self.extensions.contains(&Extension::Sus4) {
                out.push_str("sus4");
            } else if self.extensions.contains(&Extension::Sus2) {
                out.push_str("sus2");
            } else {
                out.push_str("sus");
            }
            for ext in &self.extensions {
                if ext.is_natural_upper() || ext.is_alteration() || *ext == Extension::Five {
                    out.push_str(ext.token());
                }
            }
        } else {
            out.push_str(self.family.quality_str());
            // `m7` followed by `b5` would read back as `m7b5`
            let late = |e: &&Extension| self.family == ChordFamily::Minor7 && **e == Extension::Flat5;
            for ext in self.extensions.iter().filter(|e| !late(e)) {
                out.push_str(ext.token());
            }
            for ext in self.extensions.iter().filter(late) {
                out.push_str(ext.token());
            }
        }
        if let Some(bass) = self.bass {
            out.push('/');
            out.push_str(pitch_name(bass, true));
        }
        out
    }
}

impl fmt::Display for ParsedChord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for ParsedChord {
    type Err = ChordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_chord(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quality {
    Maj7,
    Maj,
    MinMaj7,
    HalfDim,
    Min7,
    Min6,
    Min,
    Dim7,
    Dim,
    Aug,
    Seven,
    Six,
    Five,
    Sus,
    Sus2,
    Sus4,
    Add9,
}

#[derive(Debug, Clone, Copy)]
enum Token {
    Quality(Quality),
    Ext(Extension),
}

const TOKENS: &[(&str, Token)] = &[
    ("maj7", Token::Quality(Quality::Maj7)),
    ("M7", Token::Quality(Quality::Maj7)),
    ("Δ7", Token::Quality(Quality::Maj7)),
    ("Δ", Token::Quality(Quality::Maj7)),
    ("maj", Token::Quality(Quality::Maj)),
    ("M", Token::Quality(Quality::Maj)),
    ("minMaj7", Token::Quality(Quality::MinMaj7)),
    ("mMaj7", Token::Quality(Quality::MinMaj7)),
    ("mM7", Token::Quality(Quality::MinMaj7)),
    ("m7b5", Token::Quality(Quality::HalfDim)),
    ("min7b5", Token::Quality(Quality::HalfDim)),
    ("-7b5", Token::Quality(Quality::HalfDim)),
    ("ø7", Token::Quality(Quality::HalfDim)),
    ("ø", Token::Quality(Quality::HalfDim)),
    ("h7", Token::Quality(Quality::HalfDim)),
    ("h", Token::Quality(Quality::HalfDim)),
    ("min7", Token::Quality(Quality::Min7)),
    ("m7", Token::Quality(Quality::Min7)),
    ("-7", Token::Quality(Quality::Min7)),
    ("min6", Token::Quality(Quality::Min6)),
    ("m6", Token::Quality(Quality::Min6)),
    ("-6", Token::Quality(Quality::Min6)),
    ("min", Token::Quality(Quality::Min)),
    ("m", Token::Quality(Quality::Min)),
    ("-", Token::Quality(Quality::Min)),
    ("dim7", Token::Quality(Quality::Dim7)),
    ("o7", Token::Quality(Quality::Dim7)),
    ("°7", Token::Quality(Quality::Dim7)),
    ("dim", Token::Quality(Quality::Dim)),
    ("o", Token::Quality(Quality::Dim)),
    ("°", Token::Quality(Quality::Dim)),
    ("aug", Token::Quality(Quality::Aug)),
    ("+", Token::Quality(Quality::Aug)),
    ("sus4", Token::Quality(Quality::Sus4)),
    ("sus2", Token::Quality(Quality::Sus2)),
    ("sus", Token::Quality(Quality::Sus)),
    ("add9", Token::Quality(Quality::Add9)),
    ("b13", Token::Ext(Extension::Flat13)),
    ("#13", Token::Ext(Extension::Sharp13)),
    ("13", Token::Ext(Extension::Thirteen)),
    ("b11", Token::Ext(Extension::Flat11)),
    ("#11", Token::Ext(Extension::Sharp11)),
    ("11", Token::Ext(Extension::Eleven)),
    ("b9", Token::Ext(Extension::Flat9)),
    ("#9", Token::Ext(Extension::Sharp9)),
    ("9", Token::Ext(Extension::Nine)),
    ("b5", Token::Ext(Extension::Flat5)),
    ("#5", Token::Ext(Extension::Sharp5)),
    ("7", Token::Quality(Quality::Seven)),
    ("6", Token::Quality(Quality::Six)),
    ("5", Token::Quality(Quality::Five)),
];

/// Parses a chord symbol (see the module docs for the grammar).
pub fn parse_chord(symbol: &str) -> Result<ParsedChord, ChordError> {
    let normalized = symbol.trim().replace('♭', "b").replace('♯', "#");
    if normalized.is_empty() {
        return Err(ChordError::Empty);
    }
    let mut chord = match normalized.split_once('|') {
        Some((upper, lower)) => {
            let upper = parse_slash(upper.trim(), symbol)?;
            let mut lower = parse_slash(lower.trim(), symbol)?;
            if upper.is_no_chord() || lower.is_no_chord() {
                return Err(ChordError::UnknownQuality { symbol: symbol.to_string(), quality: "NC".to_string() });
            }
            lower.upper = Some(Box::new(upper));
            lower
        }
        None => parse_slash(&normalized, symbol)?,
    };
    chord.raw = symbol.to_string();
    Ok(chord)
}

fn parse_slash(text: &str, symbol: &str) -> Result<ParsedChord, ChordError> {
    if matches!(text, "NC" | "N.C." | "N.C") {
        return Ok(ParsedChord::no_chord());
    }
    let (body, bass) = match text.split_once('/') {
        Some((body, bass)) => {
            let (pc, rest) = parse_root(bass).ok_or_else(|| ChordError::UnparseableSymbol(symbol.to_string()))?;
            if !rest.is_empty() {
                return Err(ChordError::UnknownQuality { symbol: symbol.to_string(), quality: format!("/{bass}") });
            }
            (body, Some(pc))
        }
        None => (text, None),
    };
    let (root, rest) = parse_root(body).ok_or_else(|| ChordError::UnparseableSymbol(symbol.to_string()))?;
    let (family, extensions) = parse_quality(rest)
        .ok_or_else(|| ChordError::UnknownQuality { symbol: symbol.to_string(), quality: rest.to_string() })?;
    Ok(ParsedChord { root, family, extensions, bass, upper: None, raw: String::new() })
}

fn parse_root(text: &str) -> Option<(PitchClass, &str)> {
    let mut chars = text.chars();
    let base = match chars.next()? {
        'C' => 0,
        'D' => 2,
        'E' => 4,
        'F' => 5,
        'G' => 7,
        'A' => 9,
        'B' => 11,
        _ => return None,
    };
    let mut offset = 0;
    let mut consumed = 1;
    for c in text[1..].chars().take(2) {
        match c {
            '#' => offset += 1,
            'b' => offset -= 1,
            _ => break,
        }
        consumed += 1;
    }
    Some((PitchClass::new(base + offset), &text[consumed..]))
}

fn tokenize(mut text: &str) -> Option<Vec<Token>> {
    let mut tokens = Vec::new();
    while !text.is_empty() {
        let (lit, token) = TOKENS.iter().filter(|(lit, _)| text.starts_with(lit)).max_by_key(|(lit, _)| lit.len())?;
        tokens.push(*token);
        text = &text[lit.len()..];
    }
    Some(tokens)
}

fn parse_quality(text: &str) -> Option<(ChordFamily, BTreeSet<Extension>)> {
    use ChordFamily as F;
    use Quality as Q;

    let tokens = tokenize(text)?;
    let mut quals = Vec::new();
    let mut exts = BTreeSet::new();
    for (i, token) in tokens.into_iter().enumerate() {
        match token {
            // only the first token can be the power-chord quality
            Token::Quality(Q::Five) if i > 0 => {
                exts.insert(Extension::Five);
            }
            Token::Quality(q) => quals.push(q),
            Token::Ext(e) => {
                exts.insert(e);
            }
        }
    }
    let has_upper = exts.iter().any(|e| e.is_natural_upper());

    let sus_pos = quals.iter().position(|q| matches!(q, Q::Sus | Q::Sus2 | Q::Sus4));
    if let Some(pos) = sus_pos {
        let sus = quals.remove(pos);
        match quals.as_slice() {
            [] => {}
            [Q::Seven] => {
                exts.insert(Extension::Seventh);
            }
            _ => return None,
        }
        match sus {
            Q::Sus2 => exts.insert(Extension::Sus2),
            Q::Sus4 => exts.insert(Extension::Sus4),
            _ => true,
        };
        return Some((F::Sus, exts));
    }

    let family = match quals.as_slice() {
        [] if exts.is_empty() => F::MajorTriad,
        [] => F::Dominant7,
        [Q::Maj7] => F::Major7,
        [Q::Maj] if exts.is_empty() => F::MajorTriad,
        [Q::Maj] => F::Major7,
        [Q::MinMaj7] | [Q::Min, Q::Maj7] => F::MinorMajor7,
        [Q::HalfDim] => F::Minor7Flat5,
        [Q::Min7] => F::Minor7,
        [Q::Min6] => F::Minor6,
        [Q::Min] if has_upper => F::Minor7,
        [Q::Min] => F::MinorTriad,
        [Q::Min, Q::Add9] if exts.is_empty() => {
            exts.insert(Extension::Add9);
            F::MinorTriad
        }
        [Q::Dim7] => F::Diminished7,
        [Q::Dim] => F::DiminishedTriad,
        [Q::Aug] if exts.is_empty() => F::AugmentedTriad,
        [Q::Aug] => {
            exts.insert(Extension::Sharp5);
            F::Dominant7
        }
        [Q::Aug, Q::Seven] | [Q::Seven, Q::Aug] => {
            exts.insert(Extension::Sharp5);
            F::Dominant7
        }
        [Q::Aug, Q::Maj7] | [Q::Maj7, Q::Aug] => {
            exts.insert(Extension::Sharp5);
            F::Major7
        }
        [Q::Seven] => F::Dominant7,
        [Q::Six] => F::Major6,
        [Q::Five] => F::Power,
        [Q::Add9] => F::MajorTriadAdd9,
        _ => return None,
    };
    if exts.contains(&Extension::Add9) && family != F::MinorTriad {
        return None;
    }
    Some((family, exts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ParsedChord {
        parse_chord(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    #[test]
    fn half_diminished() {
        let c = p("Cm7b5");
        assert_eq!(c.root.value(), 0);
        assert_eq!(c.family, ChordFamily::Minor7Flat5);
        assert!(c.extensions.is_empty());
    }

    #[test]
    fn no_chord() {
        let c = p("NC");
        assert_eq!(c.family, ChordFamily::NoChord);
        assert!(c.extensions.is_empty());
        assert_eq!(c.category(), Category::NoChord);
    }

    #[test]
    fn slash_chord() {
        let c = p("Dm7/G");
        assert_eq!(c.root.value(), 2);
        assert_eq!(c.family, ChordFamily::Minor7);
        assert_eq!(c.bass, Some(PitchClass::new(7)));
        assert_eq!(c.category(), Category::Slash);
    }

    #[test]
    fn thirteenth_is_dominant() {
        let c = p("C13");
        assert_eq!(c.family, ChordFamily::Dominant7);
        assert_eq!(c.extensions, BTreeSet::from([Extension::Thirteen]));
    }

    #[test]
    fn quality_table() {
        use ChordFamily::*;
        let cases = [
            ("C", MajorTriad),
            ("CM", MajorTriad),
            ("CM7", Major7),
            ("Cmaj7", Major7),
            ("CM9", Major7),
            ("CM7#11", Major7),
            ("C7", Dominant7),
            ("C9", Dominant7),
            ("C7b9", Dominant7),
            ("C7#5", Dominant7),
            ("C+7", Dominant7),
            ("Cm", MinorTriad),
            ("Cm7", Minor7),
            ("Cm9", Minor7),
            ("Cm11", Minor7),
            ("C-7", Minor7),
            ("Cm6", Minor6),
            ("CmM7", MinorMajor7),
            ("CminMaj7", MinorMajor7),
            ("C6", Major6),
            ("C69", Major6),
            ("Co7", Diminished7),
            ("Cdim7", Diminished7),
            ("Co", DiminishedTriad),
            ("Cdim", DiminishedTriad),
            ("Caug", AugmentedTriad),
            ("C+", AugmentedTriad),
            ("C5", Power),
            ("Cadd9", MajorTriadAdd9),
            ("Csus", Sus),
            ("Csus2", Sus),
            ("C7sus4", Sus),
            ("C9sus4", Sus),
            ("Ch", Minor7Flat5),
            ("Cø7", Minor7Flat5),
        ];
        for (sym, fam) in cases {
            assert_eq!(p(sym).family, fam, "{sym}");
        }
    }

    #[test]
    fn sus_keeps_degree_as_extension() {
        let c = p("G7sus4");
        assert_eq!(c.root.value(), 7);
        assert!(c.extensions.contains(&Extension::Sus4));
        assert!(c.extensions.contains(&Extension::Seventh));
    }

    #[test]
    fn enharmonic_roots() {
        assert_eq!(p("C#7").root, p("Db7").root);
        assert_eq!(p("C##").root, p("D").root);
        assert_eq!(p("Dbb").root, p("C").root);
        assert_eq!(p("Cb").root.value(), 11);
        assert_eq!(p("B♭7").root.value(), 10);
    }

    #[test]
    fn polychord_keeps_lower_structure() {
        let c = p("D|C7");
        assert_eq!(c.root.value(), 0);
        assert_eq!(c.family, ChordFamily::Dominant7);
        let upper = c.upper.as_ref().unwrap();
        assert_eq!(upper.root.value(), 2);
        assert_eq!(upper.family, ChordFamily::MajorTriad);
        assert_eq!(c.category(), Category::Polychord);
    }

    #[test]
    fn extension_runs_after_any_quality() {
        assert_eq!(p("A55").family, ChordFamily::Power);
        assert!(p("A55").extensions.contains(&Extension::Five));
        assert_eq!(p("C5b9").family, ChordFamily::Power);
        assert_eq!(p("Cm#13").family, ChordFamily::MinorTriad);
        assert_eq!(p("Cob11").family, ChordFamily::DiminishedTriad);
        assert_eq!(p("Cadd9#11").family, ChordFamily::MajorTriadAdd9);
        assert_eq!(p("C+b9").family, ChordFamily::Dominant7);
        let m = p("Cm79b5");
        assert_eq!(m.family, ChordFamily::Minor7);
        assert_eq!(m.render(), "Cm79b5");
        assert_eq!(p(&m.render()), m);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_chord("Xyz7"), Err(ChordError::UnparseableSymbol(_))));
        assert!(matches!(parse_chord("c7"), Err(ChordError::UnparseableSymbol(_))));
        assert!(matches!(parse_chord("   "), Err(ChordError::Empty)));
        assert!(matches!(parse_chord("C7xyz"), Err(ChordError::UnknownQuality { .. })));
        assert!(matches!(parse_chord("C76"), Err(ChordError::UnknownQuality { .. })));
        assert!(matches!(parse_chord("Cm7sus4"), Err(ChordError::UnknownQuality { .. })));
        assert!(matches!(parse_chord("C/H"), Err(ChordError::UnparseableSymbol(_))));
        assert!(matches!(parse_chord("C/G7"), Err(ChordError::UnknownQuality { .. })));
        assert!(matches!(parse_chord("NC|C"), Err(ChordError::UnknownQuality { .. })));
    }

    #[test]
    fn names() {
        assert_eq!(pitch_name(PitchClass::new(0), false), "C");
        assert_eq!(pitch_name(PitchClass::new(1), true), "Db");
        assert_eq!(pitch_name(PitchClass::new(10), false), "A#");
        assert_eq!(PitchClass::new(-1).value(), 11);
    }

    #[test]
    fn render_examples() {
        for (sym, rendered) in [
            ("Cm7b5", "Cm7b5"),
            ("C#9", "Db79"),
            ("G7sus4", "G7sus4"),
            ("Eb9sus4", "Ebsus49"),
            ("Dm7/G", "Dm7/G"),
            ("D|C7", "D|C7"),
            ("NC", "NC"),
            ("Cmadd9", "Cmadd9"),
        ] {
            assert_eq!(p(sym).render(), rendered);
            assert_eq!(p(&p(sym).render()), p(sym));
        }
    }
}
