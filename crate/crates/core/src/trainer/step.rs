//! Per-position negative-sampling updates shared by the training loops and
//! the public single-step API.

use crate::lfw::{ParamGrad, WeightTable, MAX_PARAMS};
use crate::scalar::{axpy, dot, dot_axpy, log_sigmoid, sigmoid, Scalar};

use super::embeddings::EmbeddingMatrices;
use super::hogwild::SharedMatrices;

/// Loss and `∂loss/∂score` of one logistic term: the observed word when
/// `positive`, a noise word otherwise.
#[inline]
pub fn ns_term<F: Scalar>(score: F, positive: bool) -> (F, F) {
    if positive {
        (-log_sigmoid(score), sigmoid(score) - F::one())
    } else {
        (-log_sigmoid(-score), sigmoid(score))
    }
}

/// Reusable buffers for one worker.
#[derive(Debug, Clone)]
pub struct Scratch<F> {
    hidden: Vec<F>,
    grad: Vec<F>,
}

impl<F: Scalar> Scratch<F> {
    pub fn new(dim: usize) -> Self {
        Scratch {
            hidden: vec![F::zero(); dim],
            grad: vec![F::zero(); dim],
        }
    }
}

/// Context of one CBOW update.
#[derive(Debug, Clone, Copy)]
pub struct CbowPosition<'a> {
    pub tokens: &'a [u32],
    pub position: usize,
    pub left: usize,
    pub right: usize,
    pub negatives: &'a [u32],
}

/// One CBOW step. The pooled context is predicted against the center word and
/// the negatives; output rows and every context input row (scaled by
/// `λ_i/Z`) are updated in place. When `weights` carries learnable
/// parameters their gradient is added to `param_grad`. Returns the loss.
///
/// # Safety
/// Row indices must be valid for `m`.
pub(crate) unsafe fn cbow_update<F: Scalar>(
    m: &SharedMatrices<'_, F>,
    at: CbowPosition<'_>,
    weights: &WeightTable<f64>,
    lr: F,
    scratch: &mut Scratch<F>,
    param_grad: &mut ParamGrad<f64>,
) -> F {
    let CbowPosition {
        tokens,
        position,
        left,
        right,
        negatives,
    } = at;
    let learn_params = weights.param_count() > 0;
    let offsets = (-(left as i64)..0).chain(1..=right as i64);
    let ctx_word = |o: i64| tokens[(position as i64 + o) as usize];

    let mut z64 = 0.0f64;
    for o in offsets.clone() {
        z64 += weights.lambda(o);
    }
    let z = F::from_f64_lossy(z64);

    let hidden = &mut scratch.hidden;
    hidden.iter_mut().for_each(|x| *x = F::zero());
    for o in offsets.clone() {
        let l = F::from_f64_lossy(weights.lambda(o));
        axpy(l, m.input.row(ctx_word(o)), hidden);
    }
    for h in hidden.iter_mut() {
        *h /= z;
    }

    let grad = &mut scratch.grad;
    grad.iter_mut().for_each(|x| *x = F::zero());
    let mut loss = F::zero();
    let target = tokens[position];
    for (j, &w) in std::iter::once(&target).chain(negatives).enumerate() {
        let out = m.output.row_mut(w);
        let (l, c) = ns_term(dot(hidden, out), j == 0);
        loss += l;
        axpy(c, out, grad);
        axpy(-lr * c, hidden, out);
    }

    // Running sums for the weight-parameter gradient
    // (1/Z) Σ_j ∂λ_j/∂p (s_j − s̄) = (1/Z) (Σ_j ∂λ_j/∂p s_j − s̄ Σ_j ∂λ_j/∂p)
    // with s_j = g · u_j and s̄ = Σ_j λ_j s_j / Z.
    let n = weights.param_count();
    let mut weighted_s = 0.0f64;
    let mut grad_s = [0.0f64; MAX_PARAMS];
    let mut grad_sum = [0.0f64; MAX_PARAMS];
    for o in offsets {
        let l = weights.lambda(o);
        let row = m.input.row_mut(ctx_word(o));
        let step = -lr * (F::from_f64_lossy(l) / z);
        if learn_params {
            let s = dot_axpy(step, grad, row).to_f64_lossy();
            weighted_s += l * s;
            let dl = weights.grad(o);
            for p in 0..n {
                grad_s[p] += dl[p] * s;
                grad_sum[p] += dl[p];
            }
        } else {
            axpy(step, grad, row);
        }
    }
    if learn_params {
        let mean = weighted_s / z64;
        for p in 0..n {
            param_grad[p] += (grad_s[p] - mean * grad_sum[p]) / z64;
        }
    }
    loss
}

/// One Skip-gram step predicting `context` from `center`. Returns the loss.
///
/// # Safety
/// Row indices must be valid for `m`.
pub(crate) unsafe fn skipgram_update<F: Scalar>(
    m: &SharedMatrices<'_, F>,
    center: u32,
    context: u32,
    negatives: &[u32],
    lr: F,
    scratch: &mut Scratch<F>,
) -> F {
    let grad = &mut scratch.grad;
    grad.iter_mut().for_each(|x| *x = F::zero());
    let mut loss = F::zero();
    {
        let h = m.input.row(center);
        for (j, &w) in std::iter::once(&context).chain(negatives).enumerate() {
            let out = m.output.row_mut(w);
            let (l, c) = ns_term(dot(h, out), j == 0);
            loss += l;
            axpy(c, out, grad);
            axpy(-lr * c, h, out);
        }
    }
    axpy(-lr, grad, m.input.row_mut(center));
    loss
}

fn check_rows<F: Scalar>(m: &EmbeddingMatrices<F>, words: impl IntoIterator<Item = u32>) {
    for w in words {
        assert!((w as usize) < m.vocab_size(), "word index {w} out of range");
    }
}

/// Safe single-threaded CBOW step on owned matrices.
pub fn cbow_step<F: Scalar>(
    m: &mut EmbeddingMatrices<F>,
    at: CbowPosition<'_>,
    weights: &WeightTable<f64>,
    lr: F,
    param_grad: &mut ParamGrad<f64>,
) -> F {
    assert!(at.left <= at.position && at.position + at.right < at.tokens.len());
    assert!(at.left <= weights.window() && at.right <= weights.window());
    assert!(at.left + at.right > 0, "CBOW step needs a context word");
    let lo = at.position - at.left;
    let hi = at.position + at.right;
    check_rows(
        m,
        at.tokens[lo..=hi]
            .iter()
            .copied()
            .chain(at.negatives.iter().copied()),
    );
    let mut scratch = Scratch::new(m.dim());
    let shared = SharedMatrices::new(m);
    unsafe { cbow_update(&shared, at, weights, lr, &mut scratch, param_grad) }
}

/// Safe single-threaded Skip-gram step on owned matrices.
pub fn skipgram_step<F: Scalar>(
    m: &mut EmbeddingMatrices<F>,
    center: u32,
    context: u32,
    negatives: &[u32],
    lr: F,
) -> F {
    check_rows(
        m,
        [center, context]
            .into_iter()
            .chain(negatives.iter().copied()),
    );
    let mut scratch = Scratch::new(m.dim());
    let shared = SharedMatrices::new(m);
    unsafe { skipgram_update(&shared, center, context, negatives, lr, &mut scratch) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_terms() {
        let (l, c) = ns_term(0.0f64, true);
        assert!((l - 2f64.ln()).abs() < 1e-15);
        assert_eq!(c, -0.5);
        let (l, c) = ns_term(0.0f64, false);
        assert!((l - 2f64.ln()).abs() < 1e-15);
        assert_eq!(c, 0.5);
    }

    #[test]
    fn zero_output_rows_leave_inputs_untouched() {
        // zero output rows give a zero hidden gradient on the first step
        let mut m = EmbeddingMatrices::<f32>::new(4, 5, 3).unwrap();
        let before = m.input().to_vec();
        let tokens = [0u32, 1, 2, 3];
        let mut pg = [0.0; 4];
        cbow_step(
            &mut m,
            CbowPosition {
                tokens: &tokens,
                position: 1,
                left: 1,
                right: 2,
                negatives: &[3],
            },
            &WeightTable::uniform(2),
            0.05,
            &mut pg,
        );
        assert_eq!(m.input(), &before[..]);
        assert!(m.output_row(1).iter().any(|&x| x != 0.0));
        assert!(m.output_row(0).iter().all(|&x| x == 0.0));
    }
}
