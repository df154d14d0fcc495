use crate::scalar::{axpy, Scalar};

/// Fraction of the initial rate below which decay stops.
pub const LR_FLOOR_RATIO: f64 = 1e-4;

/// Linear decay with processed-token fraction, floored at
/// `initial * LR_FLOOR_RATIO`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningRate {
    initial: f64,
}

impl LearningRate {
    pub fn new(initial: f64) -> Self {
        LearningRate { initial }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn at(&self, progress: f64) -> f64 {
        (self.initial * (1.0 - progress)).max(self.initial * LR_FLOOR_RATIO)
    }
}

/// `row -= lr * grad`
#[inline]
pub fn sgd_step<F: Scalar>(row: &mut [F], grad: &[F], lr: F) {
    axpy(-lr, grad, row);
}
