use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::vocab::Vocabulary;
use crate::error::{Error, Result};

/// Conventional unigram distortion exponent.
pub const DEFAULT_DISTORTION: f64 = 0.75;

/// Noise distribution `count^e / sum(count^e)` over vocabulary indices,
/// backed by an alias table (O(1) draws, O(|V|) memory, exact probabilities).
#[derive(Debug, Clone)]
pub struct NegativeSamplingTable {
    alias: WeightedAliasIndex<f64>,
    len: usize,
    exponent: f64,
}

impl NegativeSamplingTable {
    pub fn new(vocab: &Vocabulary, exponent: f64) -> Result<Self> {
        Self::from_counts(vocab.counts(), exponent)
    }

    pub fn from_counts(counts: &[u64], exponent: f64) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(exponent)).collect();
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::Config(format!("invalid sampling weights: {e}")))?;
        Ok(NegativeSamplingTable {
            alias,
            len: counts.len(),
            exponent,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// One unconditioned draw.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.alias.sample(rng) as u32
    }

    /// Draws `k` noise words, redrawing any draw equal to `exclude`.
    pub fn sample_negatives<R: Rng + ?Sized>(
        &self,
        k: usize,
        exclude: u32,
        rng: &mut R,
    ) -> Result<Vec<u32>> {
        let mut out = vec![0; k];
        self.fill_negatives(&mut out, exclude, rng)?;
        Ok(out)
    }

    /// Like [`sample_negatives`](Self::sample_negatives) but writes into `out`.
    #[inline]
    pub fn fill_negatives<R: Rng + ?Sized>(
        &self,
        out: &mut [u32],
        exclude: u32,
        rng: &mut R,
    ) -> Result<()> {
        if self.len < 2 {
            return Err(Error::DegenerateVocabulary);
        }
        for slot in out.iter_mut() {
            *slot = loop {
                let w = self.sample(rng);
                if w != exclude {
                    break w;
                }
            };
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn empirical(counts: &[u64], exponent: f64, draws: usize, seed: u64) -> Vec<f64> {
        let t = NegativeSamplingTable::from_counts(counts, exponent).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hist = vec![0usize; counts.len()];
        for _ in 0..draws {
            hist[t.sample(&mut rng) as usize] += 1;
        }
        hist.into_iter().map(|h| h as f64 / draws as f64).collect()
    }

    #[test]
    fn single_word_vocabulary_is_degenerate() {
        let t = NegativeSamplingTable::from_counts(&[1], DEFAULT_DISTORTION).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            t.sample_negatives(3, 0, &mut rng),
            Err(Error::DegenerateVocabulary)
        ));
    }

    #[test]
    fn distorted_unigram_frequencies() {
        let p = empirical(&[3, 1], 0.75, 1_000_000, 7);
        let expected = 3f64.powf(0.75) / (3f64.powf(0.75) + 1.0);
        assert!((expected - 0.695).abs() < 1e-3);
        assert!((p[0] - expected).abs() < 0.01, "{} vs {expected}", p[0]);
    }

    #[test]
    fn uniform_under_unit_exponent() {
        let p = empirical(&[1, 1], 1.0, 1_000_000, 11);
        assert!((p[0] - 0.5).abs() < 0.01);
        assert!((p[1] - 0.5).abs() < 0.01);
    }

    #[test]
    fn excluded_word_never_returned() {
        let t = NegativeSamplingTable::from_counts(&[100, 1, 1], 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let negs = t.sample_negatives(5, 0, &mut rng).unwrap();
            assert_eq!(negs.len(), 5);
            assert!(negs.iter().all(|&w| w != 0));
        }
    }
}
