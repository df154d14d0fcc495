use std::io::BufRead;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vocab::{for_each_word, Vocabulary};
use crate::error::{Error, Result};

/// Conventional subsampling threshold `t`.
pub const DEFAULT_SUBSAMPLE_THRESHOLD: f64 = 1e-5;

/// Probability of keeping an occurrence of a word with relative frequency
/// `freq` under threshold `t`: `min(1, sqrt(t/f) + t/f)`.
///
/// A non-finite threshold disables subsampling.
pub fn keep_probability(freq: f64, threshold: f64) -> f64 {
    if !threshold.is_finite() || freq <= 0.0 {
        return 1.0;
    }
    let ratio = threshold / freq;
    (ratio.sqrt() + ratio).min(1.0)
}

/// Corpus as vocabulary ids in order. Out-of-vocabulary words are dropped
/// on ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenStream {
    ids: Vec<u32>,
    subsample: Option<f64>,
}

impl TokenStream {
    pub fn new(ids: Vec<u32>) -> Self {
        TokenStream {
            ids,
            subsample: None,
        }
    }

    /// Second pass over a corpus: maps every in-vocabulary word to its id.
    pub fn from_reader<R: BufRead>(reader: R, vocab: &Vocabulary) -> Result<Self> {
        let mut ids = Vec::with_capacity(vocab.total_tokens() as usize);
        for_each_word(reader, |w| {
            if let Ok(s) = std::str::from_utf8(w) {
                if let Some(i) = vocab.index_of(s) {
                    ids.push(i);
                }
            }
        })?;
        Ok(Self::new(ids))
    }

    /// Sets the subsampling threshold; `None` keeps every token.
    pub fn with_subsampling(mut self, threshold: Option<f64>) -> Self {
        self.subsample = threshold;
        self
    }

    pub fn subsample_threshold(&self) -> Option<f64> {
        self.subsample
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Splits the stream into `parts` contiguous, disjoint ranges covering it.
    pub fn partition(&self, parts: usize) -> Vec<Range<usize>> {
        let parts = parts.max(1);
        let n = self.ids.len();
        (0..parts)
            .map(|p| (p * n / parts)..((p + 1) * n / parts))
            .collect()
    }

    /// Applies subsampling to `range`, each occurrence decided independently.
    /// Returns the range verbatim when subsampling is disabled.
    pub fn subsampled<R: Rng>(
        &self,
        vocab: &Vocabulary,
        range: Range<usize>,
        rng: &mut R,
    ) -> Vec<u32> {
        let slice = &self.ids[range];
        match self.subsample {
            None => slice.to_vec(),
            Some(t) => {
                let keep: Vec<f64> = (0..vocab.len() as u32)
                    .map(|w| keep_probability(vocab.frequency(w), t))
                    .collect();
                slice
                    .iter()
                    .copied()
                    .filter(|&w| {
                        let p = keep[w as usize];
                        p >= 1.0 || rng.random::<f64>() < p
                    })
                    .collect()
            }
        }
    }
}

/// Number of context words available on each side of `position` in a stream
/// of length `len` with maximum offset `window`.
#[inline]
pub fn window_bounds(position: usize, len: usize, window: usize) -> (usize, usize) {
    let left = position.min(window);
    let right = (len - 1 - position).min(window);
    (left, right)
}

/// A center position and the context offsets present around it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextWindow {
    pub position: usize,
    pub center: u32,
    pub left: usize,
    pub right: usize,
}

impl ContextWindow {
    /// Signed offsets `-left..=-1` then `1..=right`.
    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        (-(self.left as i64)..0).chain(1..=self.right as i64)
    }

    pub fn len(&self) -> usize {
        self.left + self.right
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Iterator over the context windows of a (subsampled) token sequence.
#[derive(Debug, Clone)]
pub struct Positions {
    tokens: Vec<u32>,
    window: usize,
    next: usize,
}

impl Positions {
    pub fn tokens(&self) -> &[u32] {
        &self.tokens
    }
}

impl Iterator for Positions {
    type Item = ContextWindow;

    fn next(&mut self) -> Option<ContextWindow> {
        if self.next >= self.tokens.len() {
            return None;
        }
        let position = self.next;
        self.next += 1;
        let (left, right) = window_bounds(position, self.tokens.len(), self.window);
        Some(ContextWindow {
            position,
            center: self.tokens[position],
            left,
            right,
        })
    }
}

/// Yields every center position with offsets `0 < |i| <= window`, truncated
/// at the stream ends. Subsampling (when configured on the stream) is
/// driven by `seed`, so equal seeds give identical sequences.
pub fn stream_positions(
    stream: &TokenStream,
    vocab: &Vocabulary,
    window: usize,
    seed: u64,
) -> Result<Positions> {
    if window == 0 {
        return Err(Error::Config("window must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tokens = stream.subsampled(vocab, 0..stream.len(), &mut rng);
    Ok(Positions {
        tokens,
        window,
        next: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab3() -> Vocabulary {
        Vocabulary::from_counts([("w0", 3u64), ("w1", 2), ("w2", 1)], 1).unwrap()
    }

    #[test]
    fn left_side_truncated_at_start() {
        let v = vocab3();
        let s = TokenStream::new(vec![0, 1, 2]);
        let first = stream_positions(&s, &v, 2, 0).unwrap().next().unwrap();
        assert_eq!(first.offsets().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn interior_window_of_one() {
        let v = vocab3();
        let s = TokenStream::new(vec![0, 1, 2]);
        let mid = stream_positions(&s, &v, 1, 0).unwrap().nth(1).unwrap();
        assert_eq!(mid.offsets().collect::<Vec<_>>(), vec![-1, 1]);
        assert_eq!(mid.center, 1);
    }

    #[test]
    fn zero_window_rejected_and_empty_stream_is_empty() {
        let v = vocab3();
        assert!(stream_positions(&TokenStream::new(vec![0]), &v, 0, 0).is_err());
        assert_eq!(
            stream_positions(&TokenStream::new(vec![]), &v, 3, 0)
                .unwrap()
                .count(),
            0
        );
    }

    #[test]
    fn exhaustive_scan_of_window_fifteen() {
        let n = 10_000;
        let r = 15;
        let v = vocab3();
        let s = TokenStream::new((0..n).map(|i| (i % 3) as u32).collect());
        let mut count = 0;
        for cw in stream_positions(&s, &v, r, 1).unwrap() {
            // independent reference: enumerate offsets and keep those in range
            let expected: Vec<i64> = (-(r as i64)..=r as i64)
                .filter(|&i| i != 0)
                .filter(|&i| {
                    let p = cw.position as i64 + i;
                    p >= 0 && p < n as i64
                })
                .collect();
            let got: Vec<i64> = cw.offsets().collect();
            assert_eq!(got, expected);
            assert!(got.len() <= 2 * r);
            count += 1;
        }
        assert_eq!(count, n);
    }

    #[test]
    fn disabled_subsampling_keeps_everything() {
        let v = vocab3();
        let s = TokenStream::new(vec![0, 0, 0, 1, 1, 2]).with_subsampling(Some(f64::INFINITY));
        let kept = s.subsampled(&v, 0..s.len(), &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(kept, s.ids());
        assert_eq!(keep_probability(0.5, f64::INFINITY), 1.0);
    }

    #[test]
    fn subsampling_formula() {
        // f = 4t: sqrt(1/4) + 1/4
        assert!((keep_probability(4e-5, 1e-5) - 0.75).abs() < 1e-15);
        assert_eq!(keep_probability(1e-6, 1e-5), 1.0);
    }

    #[test]
    fn subsampling_rate_matches_probability() {
        let v = Vocabulary::from_counts([("hot", 990u64), ("cold", 10)], 1).unwrap();
        let ids: Vec<u32> = (0..200_000)
            .map(|i| if i % 100 < 99 { 0 } else { 1 })
            .collect();
        let t = 1e-2;
        let s = TokenStream::new(ids).with_subsampling(Some(t));
        let kept = s.subsampled(&v, 0..s.len(), &mut ChaCha8Rng::seed_from_u64(9));
        let hot_kept = kept.iter().filter(|&&w| w == 0).count() as f64;
        let expected = keep_probability(0.99, t);
        assert!((hot_kept / 198_000.0 - expected).abs() < 0.005);
        // cold words are rarer than t*... keep prob 1
        assert_eq!(kept.iter().filter(|&&w| w == 1).count(), 2_000);
    }

    #[test]
    fn same_seed_same_positions() {
        let v = Vocabulary::from_counts([("a", 50u64), ("b", 30), ("c", 20)], 1).unwrap();
        let ids: Vec<u32> = (0..5000).map(|i| (i * 7 % 3) as u32).collect();
        let s = TokenStream::new(ids).with_subsampling(Some(0.05));
        let a: Vec<_> = stream_positions(&s, &v, 4, 42).unwrap().collect();
        let b: Vec<_> = stream_positions(&s, &v, 4, 42).unwrap().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn partition_is_disjoint_cover() {
        let s = TokenStream::new((0..103).collect());
        let parts = s.partition(4);
        assert_eq!(parts.first().unwrap().start, 0);
        assert_eq!(parts.last().unwrap().end, 103);
        assert!(parts.windows(2).all(|p| p[0].end == p[1].start));
    }
}
