//! Corpus ingestion: vocabulary construction, token streams with
//! subsampling and sliding context windows, and the noise distribution for
//! negative sampling.
//!
//! Input is whitespace-separated lowercase text such as text8 or enwik9
//! after Mahoney's preprocessing. The whole corpus is a single stream; context
//! windows are truncated only at its two ends.

mod sampling;
mod stream;
mod vocab;

pub use sampling::{NegativeSamplingTable, DEFAULT_DISTORTION};
pub use stream::{
    keep_probability, stream_positions, window_bounds, ContextWindow, TokenStream,
    DEFAULT_SUBSAMPLE_THRESHOLD,
};
pub use vocab::{build_vocabulary, for_each_word, Vocabulary, DEFAULT_MIN_COUNT};
