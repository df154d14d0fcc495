use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("I/O error on {path}: {source}")]
    IoAt {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("corpus is empty or no word survives the frequency cutoff")]
    EmptyCorpus,

    #[error("degenerate vocabulary: negative sampling needs at least two distinct words")]
    DegenerateVocabulary,

    #[error("context offset {offset} is outside the window 0 < |i| <= {window}")]
    InvalidOffset { offset: i64, window: usize },

    #[error(
        "epoch-based window schedule needs epochs ({epochs}) and window ({window}) to be multiples of the phase count ({phases})"
    )]
    ScheduleNotDivisible {
        epochs: usize,
        window: usize,
        phases: usize,
    },

    #[error("epoch {epoch} is outside 1..={epochs}")]
    EpochOutOfRange { epoch: usize, epochs: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model file truncated while reading word {word_index}")]
    Truncated { word_index: usize },

    #[error("model header mismatch: {0}")]
    Header(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error(
        "non-finite value during training (epoch {epoch}, position {position}, word {word}): {detail}"
    )]
    NonFinite {
        epoch: usize,
        position: usize,
        word: u32,
        detail: String,
    },

    #[error("sidecar serialization failed: {0}")]
    Sidecar(String),
}

impl Error {
    pub(crate) fn io_at(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::IoAt {
            path: path.into(),
            source,
        }
    }
}
