//! Lock-free shared access to the embedding matrices.
//!
//! Workers read and write rows without synchronization. Concurrent writes to
//! the same row may lose updates; this is the accepted regime for
//! asynchronous SGD on sparse embedding updates. Within one worker, row
//! borrows are never held across another borrow of the same matrix.

use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::lfw::{LfwFormula, LfwParams, ParamGrad, MAX_PARAMS};
use crate::scalar::Scalar;

use super::embeddings::EmbeddingMatrices;

pub(crate) struct SharedMatrix<'a, F> {
    ptr: *mut F,
    rows: usize,
    dim: usize,
    _marker: PhantomData<&'a mut [F]>,
}

unsafe impl<F: Send> Send for SharedMatrix<'_, F> {}
unsafe impl<F: Send> Sync for SharedMatrix<'_, F> {}

impl<'a, F: Scalar> SharedMatrix<'a, F> {
    fn new(data: &'a mut [F], dim: usize) -> Self {
        SharedMatrix {
            ptr: data.as_mut_ptr(),
            rows: data.len() / dim,
            dim,
            _marker: PhantomData,
        }
    }

    /// # Safety
    /// No mutable borrow of row `w` may be live in the calling thread.
    #[inline]
    pub(crate) unsafe fn row(&self, w: u32) -> &[F] {
        debug_assert!((w as usize) < self.rows);
        std::slice::from_raw_parts(self.ptr.add(w as usize * self.dim), self.dim)
    }

    /// # Safety
    /// No other borrow of row `w` may be live in the calling thread.
    #[inline]
    #[allow(clippy::mut_from_ref)]
    pub(crate) unsafe fn row_mut(&self, w: u32) -> &mut [F] {
        debug_assert!((w as usize) < self.rows);
        std::slice::from_raw_parts_mut(self.ptr.add(w as usize * self.dim), self.dim)
    }
}

pub(crate) struct SharedMatrices<'a, F> {
    pub input: SharedMatrix<'a, F>,
    pub output: SharedMatrix<'a, F>,
}

impl<'a, F: Scalar> SharedMatrices<'a, F> {
    pub(crate) fn new(m: &'a mut EmbeddingMatrices<F>) -> Self {
        let dim = m.dim();
        // split borrows of the two matrices
        let input: *mut [F] = m.input_mut();
        let output: *mut [F] = m.output_mut();
        unsafe {
            SharedMatrices {
                input: SharedMatrix::new(&mut *input, dim),
                output: SharedMatrix::new(&mut *output, dim),
            }
        }
    }
}

/// Weight-formula parameters updated with atomic read-modify-write.
pub(crate) struct SharedParams {
    formula: LfwFormula,
    bits: [AtomicU64; MAX_PARAMS],
}

impl SharedParams {
    pub(crate) fn new(p: &LfwParams<f64>) -> Self {
        let bits = std::array::from_fn(|i| {
            AtomicU64::new(p.values().get(i).copied().unwrap_or(0.0).to_bits())
        });
        SharedParams {
            formula: p.formula(),
            bits,
        }
    }

    pub(crate) fn snapshot(&self) -> LfwParams<f64> {
        let n = self.formula.param_count();
        let v: Vec<f64> = self.bits[..n]
            .iter()
            .map(|b| f64::from_bits(b.load(Ordering::Acquire)))
            .collect();
        LfwParams::new(self.formula, &v).expect("param count matches formula")
    }

    pub(crate) fn add(&self, delta: &ParamGrad<f64>) {
        for (b, &d) in self.bits.iter().zip(delta).take(self.formula.param_count()) {
            if d == 0.0 {
                continue;
            }
            b.fetch_update(Ordering::AcqRel, Ordering::Acquire, |old| {
                Some((f64::from_bits(old) + d).to_bits())
            })
            .expect("closure always returns Some");
        }
    }
}
