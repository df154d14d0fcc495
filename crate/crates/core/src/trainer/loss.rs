//! Closed-form negative-sampling losses and their analytic gradients for a
//! single training instance, without updating anything. Used to verify the
//! in-place update kernels and for diagnostics.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lfw::{
    context_gradient_wrt_params, weighted_context, LfwParams, ParamGrad, WeightVector, MAX_PARAMS,
};
use crate::scalar::{axpy, dot, Scalar};

use super::embeddings::EmbeddingMatrices;
use super::step::ns_term;

/// One CBOW prediction: context words at signed offsets, the center word,
/// and fixed noise words.
#[derive(Debug, Clone)]
pub struct CbowInstance {
    pub context: Vec<(i64, u32)>,
    pub target: u32,
    pub negatives: Vec<u32>,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<F> {
    pub loss: F,
    /// Summed gradient per touched input row.
    pub input: BTreeMap<u32, Vec<F>>,
    /// Summed gradient per touched output row.
    pub output: BTreeMap<u32, Vec<F>>,
    /// Weight-parameter gradient (zero when weights are uniform).
    pub params: ParamGrad<F>,
}

fn instance_weights<F: Scalar>(
    params: Option<&LfwParams<F>>,
    inst: &CbowInstance,
) -> Result<WeightVector<F>> {
    if inst.context.is_empty() {
        return Err(Error::Config(
            "CBOW instance needs at least one context word".into(),
        ));
    }
    match params {
        Some(p) => {
            let offsets: Vec<i64> = inst.context.iter().map(|c| c.0).collect();
            WeightVector::compute(p, &offsets, inst.window)
        }
        None => Ok(WeightVector::from_lambdas(vec![
            F::one();
            inst.context.len()
        ])),
    }
}

fn samples(target: u32, negatives: &[u32]) -> impl Iterator<Item = (u32, bool)> + '_ {
    std::iter::once((target, true)).chain(negatives.iter().map(|&w| (w, false)))
}

pub fn cbow_loss<F: Scalar>(
    m: &EmbeddingMatrices<F>,
    params: Option<&LfwParams<F>>,
    inst: &CbowInstance,
) -> Result<F> {
    let weights = instance_weights(params, inst)?;
    let rows: Vec<&[F]> = inst.context.iter().map(|&(_, w)| m.input_row(w)).collect();
    let h = weighted_context(&rows, &weights)?;
    Ok(samples(inst.target, &inst.negatives)
        .map(|(w, pos)| ns_term(dot(&h, m.output_row(w)), pos).0)
        .fold(F::zero(), |a, b| a + b))
}

pub fn cbow_gradients<F: Scalar>(
    m: &EmbeddingMatrices<F>,
    params: Option<&LfwParams<F>>,
    inst: &CbowInstance,
) -> Result<Gradients<F>> {
    let d = m.dim();
    let weights = instance_weights(params, inst)?;
    let rows: Vec<&[F]> = inst.context.iter().map(|&(_, w)| m.input_row(w)).collect();
    let h = weighted_context(&rows, &weights)?;

    let mut loss = F::zero();
    let mut g = vec![F::zero(); d];
    let mut output: BTreeMap<u32, Vec<F>> = BTreeMap::new();
    for (w, pos) in samples(inst.target, &inst.negatives) {
        let o = m.output_row(w);
        let (l, c) = ns_term(dot(&h, o), pos);
        loss += l;
        axpy(c, o, &mut g);
        axpy(c, &h, output.entry(w).or_insert_with(|| vec![F::zero(); d]));
    }

    let mut input: BTreeMap<u32, Vec<F>> = BTreeMap::new();
    for (&(_, w), &l) in inst.context.iter().zip(&weights.lambdas) {
        axpy(
            l / weights.z,
            &g,
            input.entry(w).or_insert_with(|| vec![F::zero(); d]),
        );
    }

    let params = if params.is_some() {
        context_gradient_wrt_params(&g, &rows, &weights)?
    } else {
        [F::zero(); MAX_PARAMS]
    };
    Ok(Gradients {
        loss,
        input,
        output,
        params,
    })
}

pub fn skipgram_loss<F: Scalar>(
    m: &EmbeddingMatrices<F>,
    center: u32,
    context: u32,
    negatives: &[u32],
) -> F {
    let h = m.input_row(center);
    samples(context, negatives)
        .map(|(w, pos)| ns_term(dot(h, m.output_row(w)), pos).0)
        .fold(F::zero(), |a, b| a + b)
}

pub fn skipgram_gradients<F: Scalar>(
    m: &EmbeddingMatrices<F>,
    center: u32,
    context: u32,
    negatives: &[u32],
) -> Gradients<F> {
    let d = m.dim();
    let h = m.input_row(center);
    let mut loss = F::zero();
    let mut g = vec![F::zero(); d];
    let mut output: BTreeMap<u32, Vec<F>> = BTreeMap::new();
    for (w, pos) in samples(context, negatives) {
        let o = m.output_row(w);
        let (l, c) = ns_term(dot(h, o), pos);
        loss += l;
        axpy(c, o, &mut g);
        axpy(c, h, output.entry(w).or_insert_with(|| vec![F::zero(); d]));
    }
    let mut input = BTreeMap::new();
    input.insert(center, g);
    Gradients {
        loss,
        input,
        output,
        params: [F::zero(); MAX_PARAMS],
    }
}
