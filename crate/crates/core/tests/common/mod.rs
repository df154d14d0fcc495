#![allow(dead_code)]

pub mod oracle;

use std::io::Cursor;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use wordvec::corpus::{build_vocabulary, TokenStream, Vocabulary};

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Relative error with a small absolute floor so exact zeros compare sanely.
pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

pub fn corpus_from_text(text: &str, min_count: u64) -> (Vocabulary, TokenStream) {
    let vocab = build_vocabulary(Cursor::new(text), min_count).unwrap();
    let stream = TokenStream::from_reader(Cursor::new(text), &vocab).unwrap();
    (vocab, stream)
}

pub fn quick_brown_fox(times: usize) -> String {
    "the quick brown fox jumps over the lazy dog ".repeat(times)
}

/// Words `w0..w{n}` following a first-order chain: with probability `stick`
/// the next word is the fixed successor of the current one, otherwise a
/// Zipf-distributed draw. Nearby words are therefore more predictive than
/// distant ones.
pub fn markov_text(tokens: usize, vocab: usize, stick: f64, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf = Zipf::new(vocab as f64, 1.05).unwrap();
    let successor: Vec<usize> = (0..vocab).map(|w| (w * 7 + 3) % vocab).collect();
    let mut out = String::with_capacity(tokens * 5);
    let mut cur = 0usize;
    for _ in 0..tokens {
        cur = if rng.random::<f64>() < stick {
            successor[cur]
        } else {
            zipf.sample(&mut rng) as usize - 1
        };
        out.push('w');
        out.push_str(&cur.to_string());
        out.push(' ');
    }
    out
}

pub fn workspace_root() -> PathBuf {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    root.canonicalize().unwrap_or(root)
}

pub fn questions_path() -> PathBuf {
    workspace_root().join("data/questions-words.txt")
}

/// text8 location: `WORDVEC_TEXT8` or `data/text8` in the workspace.
pub fn text8_path() -> PathBuf {
    std::env::var_os("WORDVEC_TEXT8")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join("data/text8"))
}
