use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Default cutoff: words appearing no more than 5 times are dropped,
/// so a word is kept when its count is at least 6.
pub const DEFAULT_MIN_COUNT: u64 = 6;

/// Word/index maps with corpus frequencies.
///
/// Words are ordered by descending count, ties broken lexicographically, so
/// the same corpus always yields the same indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    counts: Vec<u64>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from raw `(word, count)` pairs, keeping words whose
    /// count is at least `min_count`.
    pub fn from_counts<I, S>(counts: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .map(|(w, c)| (w.into(), c))
            .filter(|(_, c)| *c >= min_count.max(1))
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        let mut words = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (w, c)) in entries.into_iter().enumerate() {
            index.insert(w.clone(), i as u32);
            words.push(w);
            counts.push(c);
        }
        let total_tokens = counts.iter().sum();
        Ok(Vocabulary {
            words,
            index,
            counts,
            total_tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sum of the counts of all retained words.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn index_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, idx: u32) -> &str {
        &self.words[idx as usize]
    }

    pub fn count(&self, idx: u32) -> u64 {
        self.counts[idx as usize]
    }

    /// Relative frequency of a word among retained tokens.
    pub fn frequency(&self, idx: u32) -> f64 {
        self.counts[idx as usize] as f64 / self.total_tokens as f64
    }

    /// Writes one `word count` pair per line in vocabulary order.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for (word, count) in self.words.iter().zip(&self.counts) {
            writeln!(w, "{word} {count}")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`Vocabulary::write_to`].
    pub fn read_from<R: BufRead>(reader: R, min_count: u64) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(word), Some(count), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: n + 1,
                    message: "expected `word count`".into(),
                });
            };
            let count = count.parse::<u64>().map_err(|e| Error::Parse {
                line: n + 1,
                message: format!("bad count: {e}"),
            })?;
            pairs.push((word.to_owned(), count));
        }
        Self::from_counts(pairs, min_count)
    }
}

/// Streams whitespace-separated words from `reader` without loading the
/// whole source, calling `f` on each word's bytes.
pub fn for_each_word<R, F>(mut reader: R, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(&[u8]),
{
    let mut pending: Vec<u8> = Vec::with_capacity(64);
    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            break;
        }
        let len = buf.len();
        let mut start = 0;
        for (i, &b) in buf.iter().enumerate() {
            if b.is_ascii_whitespace() {
                if !pending.is_empty() {
                    pending.extend_from_slice(&buf[start..i]);
                    f(&pending);
                    pending.clear();
                } else if i > start {
                    f(&buf[start..i]);
                }
                start = i + 1;
            }
        }
        pending.extend_from_slice(&buf[start..]);
        reader.consume(len);
    }
    if !pending.is_empty() {
        f(&pending);
    }
    Ok(())
}

/// Counts every word in `source` and keeps those with count `>= min_count`.
pub fn build_vocabulary<R: BufRead>(source: R, min_count: u64) -> Result<Vocabulary> {
    let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
    for_each_word(source, |w| {
        if let Some(c) = counts.get_mut(w) {
            *c += 1;
        } else {
            counts.insert(w.to_vec(), 1);
        }
    })?;
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let pairs = counts
        .into_iter()
        .map(|(w, c)| (String::from_utf8_lossy(&w).into_owned(), c));
    let vocab = Vocabulary::from_counts(pairs, min_count)?;
    log::info!(
        "vocabulary: {} words, {} retained tokens",
        vocab.len(),
        vocab.total_tokens()
    );
    Ok(vocab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufReader, Cursor};

    #[test]
    fn cutoff_drops_rare_words() {
        // keep count > 2
        let v = build_vocabulary(Cursor::new("a a a b"), 3).unwrap();
        assert_eq!(v.words(), &["a".to_string()]);
        assert_eq!(v.total_tokens(), 3);
    }

    #[test]
    fn default_cutoff_keeps_count_above_five() {
        let mut text = String::new();
        text.push_str(&"five ".repeat(5));
        text.push_str(&"six ".repeat(6));
        let v = build_vocabulary(Cursor::new(text), DEFAULT_MIN_COUNT).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.index_of("six"), Some(0));
        assert_eq!(v.index_of("five"), None);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            build_vocabulary(Cursor::new("   \n "), 1),
            Err(Error::EmptyCorpus)
        ));
        assert!(matches!(
            build_vocabulary(Cursor::new("a b c"), 2),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn ordering_is_by_count_then_word() {
        let v = build_vocabulary(Cursor::new("c b b a a z z z"), 1).unwrap();
        assert_eq!(v.words(), &["z", "a", "b", "c"]);
        for (i, w) in v.words().iter().enumerate() {
            assert_eq!(v.index_of(w), Some(i as u32));
        }
        assert!(v.counts().windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn words_split_across_buffer_boundaries() {
        let text = "alpha beta gamma delta alpha";
        let mut seen = Vec::new();
        // capacity 3 forces words to straddle refills
        for_each_word(BufReader::with_capacity(3, Cursor::new(text)), |w| {
            seen.push(String::from_utf8(w.to_vec()).unwrap())
        })
        .unwrap();
        assert_eq!(seen, ["alpha", "beta", "gamma", "delta", "alpha"]);
    }

    #[test]
    fn export_round_trip() {
        let v = build_vocabulary(Cursor::new("x y y z z z"), 1).unwrap();
        let mut out = Vec::new();
        v.write_to(&mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), "z 3\ny 2\nx 1\n");
        let back = Vocabulary::read_from(Cursor::new(out), 1).unwrap();
        assert_eq!(back, v);
    }
}
