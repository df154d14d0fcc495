//! Random instances and finite-difference helpers for gradient checks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wordvec::lfw::{LfwFormula, LfwParams};
use wordvec::trainer::loss::CbowInstance;
use wordvec::trainer::EmbeddingMatrices;
use wordvec::Params;

use super::{central_difference, rel_error};

pub const STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
pub const INSTANCES: usize = 120;
pub const VOCAB: usize = 24;
pub const DIM: usize = 8;
pub const WINDOW: usize = 5;
pub const NEGATIVES: usize = 5;

/// Smallest relative error over the step sweep: truncation error dominates
/// for large steps and cancellation for small ones.
pub fn fd_error(analytic: f64, f: impl Fn(f64) -> f64, x: f64) -> f64 {
    STEPS
        .iter()
        .map(|&h| rel_error(analytic, central_difference(&f, x, h)))
        .fold(f64::INFINITY, f64::min)
}

/// The four weight formulas written out directly.
pub fn closed_form(formula: LfwFormula, p: &[f64], offset: i64) -> f64 {
    let d = offset.unsigned_abs() as f64;
    let (a, b) = match formula {
        LfwFormula::PowerShared | LfwFormula::ExpShared => (p[0], p[1]),
        LfwFormula::PowerSplit | LfwFormula::ExpSplit if offset < 0 => (p[0], p[1]),
        LfwFormula::PowerSplit | LfwFormula::ExpSplit => (p[2], p[3]),
    };
    match formula {
        LfwFormula::PowerShared | LfwFormula::PowerSplit => d.powf(-a) + b,
        LfwFormula::ExpShared | LfwFormula::ExpSplit => (-a * d).exp() + b,
    }
}

/// Parameters kept well above the weight floor so the formulas are smooth.
pub fn random_params(formula: LfwFormula, rng: &mut ChaCha8Rng) -> Params {
    let values: Vec<f64> = (0..formula.param_count())
        .map(|k| {
            if k % 2 == 0 {
                rng.random_range(-1.0..1.5)
            } else {
                rng.random_range(0.05..1.0)
            }
        })
        .collect();
    LfwParams::new(formula, &values).unwrap()
}

pub fn random_matrices(rng: &mut ChaCha8Rng) -> EmbeddingMatrices<f64> {
    let mut draw = || {
        (0..VOCAB * DIM)
            .map(|_| rng.random_range(-0.5..0.5))
            .collect::<Vec<f64>>()
    };
    let input = draw();
    let output = draw();
    EmbeddingMatrices::from_parts(VOCAB, DIM, input, output).unwrap()
}

pub fn random_offsets(rng: &mut ChaCha8Rng) -> Vec<i64> {
    let left = rng.random_range(0..=WINDOW as i64);
    let right = rng.random_range(if left == 0 { 1 } else { 0 }..=WINDOW as i64);
    (-left..0).chain(1..=right).collect()
}

/// Context words may repeat; target and negatives may collide with them.
pub fn random_instance(rng: &mut ChaCha8Rng) -> CbowInstance {
    let context = random_offsets(rng)
        .into_iter()
        .map(|o| (o, rng.random_range(0..VOCAB as u32)))
        .collect();
    CbowInstance {
        context,
        target: rng.random_range(0..VOCAB as u32),
        negatives: (0..NEGATIVES)
            .map(|_| rng.random_range(0..VOCAB as u32))
            .collect(),
        window: WINDOW,
    }
}
