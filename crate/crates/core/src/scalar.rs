//! Floating-point scalar abstraction shared by the weight engine, the loss
//! kernels and the embedding matrices.
//!
//! Training runs in `f32`; gradient checks drive the same code in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// A real scalar usable as an embedding element: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for weights and learning rates.
    fn from_f64_lossy(v: f64) -> Self;

    /// Widening conversion to `f64`.
    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

const LANES: usize = 16;

#[inline]
fn reduce<F: Scalar>(acc: &[F; LANES]) -> F {
    acc.iter().fold(F::zero(), |s, &v| s + v)
}

/// Inner product with sixteen independent partial sums, enough to hide the
/// add latency once vectorized.
#[inline]
pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [F::zero(); LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        let x: &[F; LANES] = x.try_into().expect("exact chunk");
        let y: &[F; LANES] = y.try_into().expect("exact chunk");
        for k in 0..LANES {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = F::zero();
    for (x, y) in ra.iter().zip(rb) {
        tail += *x * *y;
    }
    reduce(&acc) + tail
}

/// `y += a * x`
#[inline]
pub fn axpy<F: Scalar>(a: F, x: &[F], y: &mut [F]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

/// `y += a * x`, returning `x · y` taken before the update. One pass over
/// both slices.
#[inline]
pub fn dot_axpy<F: Scalar>(a: F, x: &[F], y: &mut [F]) -> F {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [F::zero(); LANES];
    let cx = x.chunks_exact(LANES);
    let rx = cx.remainder();
    let mut cy = y.chunks_exact_mut(LANES);
    for (xs, ys) in cx.zip(&mut cy) {
        let xs: &[F; LANES] = xs.try_into().expect("exact chunk");
        let ys: &mut [F; LANES] = ys.try_into().expect("exact chunk");
        for k in 0..LANES {
            acc[k] += xs[k] * ys[k];
            ys[k] += a * xs[k];
        }
    }
    let mut tail = F::zero();
    for (xi, yi) in rx.iter().zip(cy.into_remainder()) {
        tail += *xi * *yi;
        *yi += a * *xi;
    }
    reduce(&acc) + tail
}

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// `ln(sigmoid(x))` without overflow for large `|x|`.
#[inline]
pub fn log_sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        -((-x).exp().ln_1p())
    } else {
        x - x.exp().ln_1p()
    }
}
