use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Input (context/center) and output matrices, row-major `|V| × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrices<F> {
    vocab_size: usize,
    dim: usize,
    input: Vec<F>,
    output: Vec<F>,
}

impl<F: Scalar> EmbeddingMatrices<F> {
    /// Input rows uniform in `[-0.5/d, 0.5/d]`, output rows zero.
    pub fn new(vocab_size: usize, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config(
                "embedding dimension must be at least 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = 0.5 / dim as f64;
        let input = (0..vocab_size * dim)
            .map(|_| F::from_f64_lossy(rng.random_range(-half..=half)))
            .collect();
        Ok(EmbeddingMatrices {
            vocab_size,
            dim,
            input,
            output: vec![F::zero(); vocab_size * dim],
        })
    }

    pub fn from_parts(
        vocab_size: usize,
        dim: usize,
        input: Vec<F>,
        output: Vec<F>,
    ) -> Result<Self> {
        for m in [&input, &output] {
            if m.len() != vocab_size * dim {
                return Err(Error::Dimension {
                    expected: vocab_size * dim,
                    actual: m.len(),
                });
            }
        }
        Ok(EmbeddingMatrices {
            vocab_size,
            dim,
            input,
            output,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input(&self) -> &[F] {
        &self.input
    }

    pub fn output(&self) -> &[F] {
        &self.output
    }

    pub fn input_row(&self, w: u32) -> &[F] {
        let s = w as usize * self.dim;
        &self.input[s..s + self.dim]
    }

    pub fn output_row(&self, w: u32) -> &[F] {
        let s = w as usize * self.dim;
        &self.output[s..s + self.dim]
    }

    pub fn input_row_mut(&mut self, w: u32) -> &mut [F] {
        let s = w as usize * self.dim;
        &mut self.input[s..s + self.dim]
    }

    pub fn output_row_mut(&mut self, w: u32) -> &mut [F] {
        let s = w as usize * self.dim;
        &mut self.output[s..s + self.dim]
    }

    pub fn into_input(self) -> Vec<F> {
        self.input
    }

    /// First non-finite entry as `(matrix, row, column)`.
    pub fn find_non_finite(&self) -> Option<(&'static str, usize, usize)> {
        for (name, m) in [("input", &self.input), ("output", &self.output)] {
            if let Some(p) = m.iter().position(|x| !x.is_finite()) {
                return Some((name, p / self.dim, p % self.dim));
            }
        }
        None
    }

    /// Converts to another precision element by element.
    pub fn cast<G: Scalar>(&self) -> EmbeddingMatrices<G> {
        let conv = |v: &Vec<F>| {
            v.iter()
                .map(|x| G::from_f64_lossy(x.to_f64_lossy()))
                .collect()
        };
        EmbeddingMatrices {
            vocab_size: self.vocab_size,
            dim: self.dim,
            input: conv(&self.input),
            output: conv(&self.output),
        }
    }

    pub(crate) fn input_mut(&mut self) -> &mut [F] {
        &mut self.input
    }

    pub(crate) fn output_mut(&mut self) -> &mut [F] {
        &mut self.output
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initialization_ranges() {
        let m = EmbeddingMatrices::<f32>::new(50, 8, 1).unwrap();
        assert!(m.input().iter().all(|x| x.abs() <= 0.5 / 8.0));
        assert!(m.output().iter().all(|&x| x == 0.0));
        assert!(m.input().iter().any(|&x| x != 0.0));
        assert_eq!(m, EmbeddingMatrices::<f32>::new(50, 8, 1).unwrap());
        assert_ne!(m, EmbeddingMatrices::<f32>::new(50, 8, 2).unwrap());
        assert!(EmbeddingMatrices::<f32>::new(5, 0, 1).is_err());
    }

    #[test]
    fn non_finite_detection() {
        let mut m = EmbeddingMatrices::<f64>::new(4, 3, 0).unwrap();
        assert_eq!(m.find_non_finite(), None);
        m.output_row_mut(2)[1] = f64::NAN;
        assert_eq!(m.find_non_finite(), Some(("output", 2, 1)));
    }
}
