//! Chord-class co-occurrence counts and the row embeddings derived from them.
//!
//! Every song becomes the token stream `<START>, s_1, ..., s_N, <END>` over
//! its reduced, transposed classes. Each adjacent pair `(a, b)` adds one to
//! `C[a][b]` and one to `C[b][a]`, so the matrix is symmetric and a
//! repeated chord contributes twice to its own diagonal cell. Rows are
//! L2-normalised to give one embedding per class; a class that never
//! occurs keeps a zero row.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::classes::{ChordClass, ChordClassSequence, CLASS_COUNT};
use crate::corpus::{Corpus, Fnv1a};
use crate::error::{Error, Result};
use crate::key::analyze_corpus;

const MAGIC: &[u8; 4] = b"CFCM";
const VERSION: u32 = 1;
const CELLS: usize = CLASS_COUNT * CLASS_COUNT;
const FILE_LEN: usize = 4 + 4 + CELLS * 8 + 8 + 8;

#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceModel {
    counts: Vec<u64>,
    corpus_size: u64,
    corpus_fingerprint: u64,
    embeddings: Vec<f64>,
    zero_rows: Vec<bool>,
    fingerprint: u64,
}

impl CooccurrenceModel {
    /// Wraps a row-major 63x63 count matrix. The matrix must be symmetric.
    pub fn from_counts(counts: Vec<u64>, corpus_size: u64, corpus_fingerprint: u64) -> Result<Self> {
        if counts.len() != CELLS {
            return Err(Error::InvalidModelFile(format!("expected {CELLS} counts, got {}", counts.len())));
        }
        for i in 0..CLASS_COUNT {
            for j in (i + 1)..CLASS_COUNT {
                if counts[i * CLASS_COUNT + j] != counts[j * CLASS_COUNT + i] {
                    return Err(Error::InvalidModelFile(format!("count matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        let mut embeddings = vec![0.0; CELLS];
        let mut zero_rows = vec![false; CLASS_COUNT];
        for i in 0..CLASS_COUNT {
            let row = &counts[i * CLASS_COUNT..(i + 1) * CLASS_COUNT];
            let norm = row.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt();
            if norm == 0.0 {
                zero_rows[i] = true;
                continue;
            }
            for (e, &c) in embeddings[i * CLASS_COUNT..(i + 1) * CLASS_COUNT].iter_mut().zip(row) {
                *e = c as f64 / norm;
            }
        }
        let mut h = Fnv1a::new();
        for c in &counts {
            h.write(&c.to_le_bytes());
        }
        h.write(&corpus_size.to_le_bytes());
        Ok(CooccurrenceModel {
            counts,
            corpus_size,
            corpus_fingerprint,
            embeddings,
            zero_rows,
            fingerprint: h.finish(),
        })
    }

    pub fn count(&self, a: ChordClass, b: ChordClass) -> u64 {
        self.counts[a.index() * CLASS_COUNT + b.index()]
    }

    /// Row-major counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn corpus_size(&self) -> u64 {
        self.corpus_size
    }

    pub fn corpus_fingerprint(&self) -> u64 {
        self.corpus_fingerprint
    }

    /// Identifies the count matrix; paths built from different models
    /// carry different fingerprints.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Unit-norm embedding of `class`, or all zeros for an unseen class.
    pub fn embedding(&self, class: ChordClass) -> &[f64] {
        let i = class.index();
        &self.embeddings[i * CLASS_COUNT..(i + 1) * CLASS_COUNT]
    }

    pub fn is_zero_row(&self, class: ChordClass) -> bool {
        self.zero_rows[class.index()]
    }

    pub fn zero_rows(&self) -> impl Iterator<Item = ChordClass> + '_ {
        ChordClass::all().filter(|c| self.is_zero_row(*c))
    }

    pub fn cosine_similarity(&self, a: ChordClass, b: ChordClass) -> f64 {
        if self.is_zero_row(a) || self.is_zero_row(b) {
            return 0.0;
        }
        if a == b {
            return 1.0;
        }
        self.embedding(a).iter().zip(self.embedding(b)).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0)
    }

    /// The `k` classes most similar to `query`, best first, including the
    /// query itself. Unseen classes are left out; ties go to the lower
    /// class index.
    pub fn nearest_classes(&self, query: ChordClass, k: usize) -> Vec<(ChordClass, f64)> {
        let mut scored: Vec<(ChordClass, f64)> = ChordClass::all()
            .filter(|c| !self.is_zero_row(*c))
            .map(|c| (c, self.cosine_similarity(query, c)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.index().cmp(&b.0.index())));
        scored.truncate(k);
        scored
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FILE_LEN);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for c in &self.counts {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out.extend_from_slice(&self.corpus_size.to_le_bytes());
        out.extend_from_slice(&self.corpus_fingerprint.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(Error::InvalidModelFile("bad magic".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::InvalidModelFile(format!("unsupported version {version}")));
        }
        if bytes.len() != FILE_LEN {
            return Err(Error::InvalidModelFile(format!("expected {FILE_LEN} bytes, got {}", bytes.len())));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[8 + i * 8..16 + i * 8].try_into().unwrap());
        let counts = (0..CELLS).map(word).collect();
        Self::from_counts(counts, word(CELLS), word(CELLS + 1))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(&bytes)
    }
}

fn count_sequence(counts: &mut [u64], seq: &ChordClassSequence) {
    let tokens =
        std::iter::once(ChordClass::Start).chain(seq.classes.iter().copied()).chain(std::iter::once(ChordClass::End));
    let mut prev: Option<ChordClass> = None;
    for token in tokens {
        if let Some(p) = prev {
            counts[p.index() * CLASS_COUNT + token.index()] += 1;
            counts[token.index() * CLASS_COUNT + p.index()] += 1;
        }
        prev = Some(token);
    }
}

/// Counts co-occurrences over sequences that are already reduced and
/// transposed.
pub fn build_model_from_sequences(
    sequences: &[ChordClassSequence],
    corpus_fingerprint: u64,
) -> Result<CooccurrenceModel> {
    if sequences.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let counts = sequences
        .par_iter()
        .fold(
            || vec![0u64; CELLS],
            |mut acc, seq| {
                count_sequence(&mut acc, seq);
                acc
            },
        )
        .reduce(
            || vec![0u64; CELLS],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    CooccurrenceModel::from_counts(counts, sequences.len() as u64, corpus_fingerprint)
}

/// Runs the whole pipeline (reduction, key estimation, transposition) and
/// counts co-occurrences.
pub fn build_model(corpus: &Corpus) -> Result<CooccurrenceModel> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let sequences: Vec<ChordClassSequence> = analyze_corpus(corpus).into_iter().map(|a| a.transposed).collect();
    build_model_from_sequences(&sequences, corpus.fingerprint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord_syntax::PitchClass;
    use crate::classes::ChordType;
    use crate::corpus::Beats;

    fn cls(ty: ChordType, root: i32) -> ChordClass {
        ChordClass::pitched(ty, PitchClass::new(root))
    }

    fn seq(classes: &[ChordClass]) -> ChordClassSequence {
        ChordClassSequence::new("s", classes.to_vec(), vec![Beats::from_integer(4); classes.len()])
    }

    #[test]
    fn single_song_pairs() {
        let dm = cls(ChordType::Minor7, 2);
        let g7 = cls(ChordType::Dominant7, 7);
        let model = build_model_from_sequences(&[seq(&[dm, g7])], 0).unwrap();
        assert_eq!(model.count(ChordClass::Start, dm), 1);
        assert_eq!(model.count(dm, ChordClass::Start), 1);
        assert_eq!(model.count(dm, g7), 1);
        assert_eq!(model.count(g7, dm), 1);
        assert_eq!(model.count(g7, ChordClass::End), 1);
        assert_eq!(model.counts().iter().sum::<u64>(), 6);
    }

    #[test]
    fn repeated_chord_counts_twice_on_diagonal() {
        let c = cls(ChordType::Major7, 0);
        let model = build_model_from_sequences(&[seq(&[c, c])], 0).unwrap();
        assert_eq!(model.count(c, c), 2);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(build_model_from_sequences(&[], 0), Err(Error::EmptyCorpus)));
        assert!(matches!(build_model(&Corpus::default()), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn cosine_and_neighbours() {
        let dm = cls(ChordType::Minor7, 2);
        let g7 = cls(ChordType::Dominant7, 7);
        let db7 = cls(ChordType::Dominant7, 1);
        let c = cls(ChordType::Major7, 0);
        let model = build_model_from_sequences(&[seq(&[dm, g7, c]), seq(&[dm, db7, c])], 0).unwrap();
        assert_eq!(model.cosine_similarity(g7, g7), 1.0);
        assert!((model.cosine_similarity(g7, db7) - 1.0).abs() < 1e-12);
        assert_eq!(model.cosine_similarity(g7, cls(ChordType::Diminished7, 0)), 0.0);
        let near = model.nearest_classes(g7, 2);
        let top: Vec<ChordClass> = near.iter().map(|n| n.0).collect();
        assert!(top.contains(&g7) && top.contains(&db7));
        assert_eq!(model.nearest_classes(c, 1), vec![(c, 1.0)]);
        assert!(model.is_zero_row(ChordClass::NoChord));
        assert!(model.embedding(ChordClass::NoChord).iter().all(|&x| x == 0.0));
        let norm: f64 = model.embedding(dm).iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bytes_round_trip() {
        let model = build_model_from_sequences(&[seq(&[cls(ChordType::Minor7, 2)])], 42).unwrap();
        let bytes = model.to_bytes();
        assert_eq!(bytes.len(), FILE_LEN);
        let back = CooccurrenceModel::from_bytes(&bytes).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.corpus_fingerprint(), 42);
        assert!(CooccurrenceModel::from_bytes(&bytes[..100]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(CooccurrenceModel::from_bytes(&bad).is_err());
        let mut asym = bytes;
        asym[8] = 0;
        asym[8 + 8] = 7;
        assert!(CooccurrenceModel::from_bytes(&asym).is_err());
    }
}
