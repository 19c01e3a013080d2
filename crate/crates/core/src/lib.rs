//! Jazz chord progressions as paths in a 63-dimensional chord-class space.
//!
//! The pipeline runs in five steps:
//!
//! 1. [`chord_syntax`] parses chord symbols.
//! 2. [`classes`] reduces each chord to one of 61 classes (five seventh-chord
//!    types on twelve roots, plus no-chord).
//! 3. [`key`] estimates each song's key signature from diatonic beat counts
//!    and transposes the song to the signature without accidentals.
//! 4. [`embedding`] counts class co-occurrences across the corpus and
//!    normalises the rows into class embeddings.
//! 5. [`path`] and [`similarity`] lay songs out as beat-scaled paths and
//!    compare them by membrane area, which drives contrafact search.
//!
//! ```
//! use contrafact::{corpus::read_corpus, embedding::build_model, similarity::*};
//!
//! let jsonl = r#"{"id":"a","title":"A","key_signature":0,"beats_per_measure":4,"chords":[["Dm7",4,1],["G7",4,1],["CM7",8,1]]}
//! {"id":"b","title":"B","key_signature":-3,"beats_per_measure":4,"chords":[["Fm7",4,1],["Bb7",4,1],["EbM7",8,1]]}
//! {"id":"c","title":"C","key_signature":0,"beats_per_measure":4,"chords":[["Am7",4,1],["D7",4,1],["Dm7",4,1],["G7",4,1]]}"#;
//! let corpus = read_corpus(jsonl.as_bytes()).unwrap();
//! let model = build_model(&corpus).unwrap();
//! let result = nearest_songs("a", &corpus, &model, &MembraneParams::default(), 2).unwrap();
//! assert_eq!(result.ranked[0].id, "b");
//! assert_eq!(result.ranked[0].distance, 0.0);
//! ```

pub mod chord_syntax;
pub mod classes;
pub mod cli;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod key;
pub mod path;
pub mod similarity;

pub use chord_syntax::{parse_chord, pitch_name, ParsedChord, PitchClass};
pub use classes::{reduce_song, ChordClass, ChordClassSequence, ChordType};
pub use corpus::{corpus_stats, load_corpus, Beats, ChordEvent, Corpus, Song};
pub use embedding::{build_model, CooccurrenceModel};
pub use error::{ChordError, Error, Result};
pub use key::{estimate_key, resolve_key, transpose, KeyEstimate, KeySignature};
pub use path::{build_path, SongPath};
pub use similarity::{membrane_area, nearest_songs, pairwise_distances, MembraneParams, SearchResult};
