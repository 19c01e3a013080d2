use std::path::PathBuf;

use thiserror::Error;

use crate::classes::ChordClass;

/// Failures while reading a single chord symbol.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChordError {
    #[error("empty chord symbol")]
    Empty,
    #[error("unparseable chord symbol `{0}`: no valid root")]
    UnparseableSymbol(String),
    #[error("unknown chord quality `{quality}` in `{symbol}`")]
    UnknownQuality { symbol: String, quality: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Chord(#[from] ChordError),

    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("line {line}: {source}")]
    BadSymbol {
        line: usize,
        #[source]
        source: ChordError,
    },

    #[error("{0} is not a pitched chord class")]
    NonPitchedClass(ChordClass),

    #[error("song `{0}` has no tonal content (only diminished or no-chord events)")]
    NoTonalContent(String),

    #[error("song `{0}` has no declared key signature")]
    MissingDeclaredKey(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("song path has zero total duration")]
    ZeroLengthPath,

    #[error("path parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),

    #[error("paths were built from different models or boundary durations")]
    ModelMismatch,

    #[error("unknown song `{0}`")]
    UnknownSong(String),

    #[error("unknown chord class `{0}`")]
    UnknownClassLabel(String),

    #[error("invalid model file: {0}")]
    InvalidModelFile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
