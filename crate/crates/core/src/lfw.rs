//! Learnable distance weights for CBOW context pooling.
//!
//! Each context word at signed offset `i` (with `0 < |i| <= r`) gets a weight
//! `λ_i` from one of four closed forms:
//!
//! | variant       | weight                                  |
//! |---------------|-----------------------------------------|
//! | `PowerShared` | `|i|^(-α) + β`                          |
//! | `PowerSplit`  | `|i|^(-α₀) + β₀` left, `|i|^(-α₁) + β₁` right |
//! | `ExpShared`   | `exp(-α|i|) + β`                        |
//! | `ExpSplit`    | `exp(-α₀|i|) + β₀` left, `exp(-α₁|i|) + β₁` right |
//!
//! The pooled context is `u_C = (1/Z) Σ λ_i u_{t+i}` with `Z = Σ λ_i` taken
//! over the offsets actually present. Since `Z` depends on the parameters,
//! `∂u_C/∂p = (1/Z) Σ_j (∂λ_j/∂p)(u_j − u_C)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Lower bound applied to every weight in the forward pass.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// Maximum number of learnable scalars of any variant.
pub const MAX_PARAMS: usize = 4;

/// Per-parameter partial derivatives; unused trailing slots stay zero.
pub type ParamGrad<F> = [F; MAX_PARAMS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LfwFormula {
    /// `|i|^(-α) + β`
    PowerShared,
    /// `|i|^(-α_s) + β_s`, one `(α, β)` pair per side
    PowerSplit,
    /// `exp(-α|i|) + β`
    ExpShared,
    /// `exp(-α_s|i|) + β_s`, one `(α, β)` pair per side
    ExpSplit,
}

impl LfwFormula {
    pub const ALL: [LfwFormula; 4] = [
        LfwFormula::PowerShared,
        LfwFormula::PowerSplit,
        LfwFormula::ExpShared,
        LfwFormula::ExpSplit,
    ];

    pub fn is_split(self) -> bool {
        matches!(self, LfwFormula::PowerSplit | LfwFormula::ExpSplit)
    }

    pub fn is_power(self) -> bool {
        matches!(self, LfwFormula::PowerShared | LfwFormula::PowerSplit)
    }

    pub fn param_count(self) -> usize {
        if self.is_split() {
            4
        } else {
            2
        }
    }

    /// Short CLI name (`eq3` .. `eq6`).
    pub fn short_name(self) -> &'static str {
        match self {
            LfwFormula::PowerShared => "eq3",
            LfwFormula::PowerSplit => "eq4",
            LfwFormula::ExpShared => "eq5",
            LfwFormula::ExpSplit => "eq6",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        if self.is_split() {
            &["alpha0", "beta0", "alpha1", "beta1"]
        } else {
            &["alpha", "beta"]
        }
    }
}

impl fmt::Display for LfwFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for LfwFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq3" | "power-shared" => Ok(LfwFormula::PowerShared),
            "eq4" | "power-split" => Ok(LfwFormula::PowerSplit),
            "eq5" | "exp-shared" => Ok(LfwFormula::ExpShared),
            "eq6" | "exp-split" => Ok(LfwFormula::ExpSplit),
            other => Err(Error::Config(format!("unknown weight formula `{other}`"))),
        }
    }
}

/// Learnable scalars of one formula. Shared variants use `[α, β]`, split
/// variants `[α₀, β₀, α₁, β₁]` with index 0 for the left side (`i < 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LfwParams<F> {
    formula: LfwFormula,
    values: [F; MAX_PARAMS],
}

impl<F: Scalar> LfwParams<F> {
    /// All parameters start at zero, where every weight equals 1.
    pub fn zeros(formula: LfwFormula) -> Self {
        LfwParams {
            formula,
            values: [F::zero(); MAX_PARAMS],
        }
    }

    /// `values` must hold exactly `formula.param_count()` entries.
    pub fn new(formula: LfwFormula, values: &[F]) -> Result<Self> {
        if values.len() != formula.param_count() {
            return Err(Error::Dimension {
                expected: formula.param_count(),
                actual: values.len(),
            });
        }
        let mut p = Self::zeros(formula);
        p.values[..values.len()].copy_from_slice(values);
        Ok(p)
    }

    pub fn formula(&self) -> LfwFormula {
        self.formula
    }

    pub fn values(&self) -> &[F] {
        &self.values[..self.formula.param_count()]
    }

    pub fn values_mut(&mut self) -> &mut [F] {
        let n = self.formula.param_count();
        &mut self.values[..n]
    }

    /// Index of the `(α, β)` pair governing `offset`.
    #[inline]
    fn pair_base(&self, offset: i64) -> usize {
        if self.formula.is_split() && offset > 0 {
            2
        } else {
            0
        }
    }

    /// `p -= lr * grad`
    pub fn apply_gradient(&mut self, grad: &ParamGrad<F>, lr: F) {
        for (v, g) in self.values_mut().iter_mut().zip(grad) {
            *v -= lr * *g;
        }
    }
}

#[inline]
fn check_offset(offset: i64, window: usize) -> Result<()> {
    if offset == 0 || offset.unsigned_abs() as usize > window {
        Err(Error::InvalidOffset { offset, window })
    } else {
        Ok(())
    }
}

/// `(decay, ∂decay/∂α)` for the decay term of the selected family.
#[inline]
fn decay<F: Scalar>(power: bool, alpha: F, dist: F) -> (F, F) {
    if power {
        let v = dist.powf(-alpha);
        (v, -dist.ln() * v)
    } else {
        let v = (-alpha * dist).exp();
        (v, -dist * v)
    }
}

/// Raw formula value `λ_i` (no floor applied).
pub fn weight<F: Scalar>(params: &LfwParams<F>, offset: i64, window: usize) -> Result<F> {
    check_offset(offset, window)?;
    let base = params.pair_base(offset);
    let dist = F::from_u64(offset.unsigned_abs()).unwrap();
    let (v, _) = decay(params.formula.is_power(), params.values[base], dist);
    Ok(v + params.values[base + 1])
}

/// Analytic partials `∂λ_i/∂p`; parameters of the inactive side are zero.
pub fn weight_gradients<F: Scalar>(
    params: &LfwParams<F>,
    offset: i64,
    window: usize,
) -> Result<ParamGrad<F>> {
    check_offset(offset, window)?;
    Ok(raw_weight_and_gradient(params, offset).1)
}

#[inline]
fn raw_weight_and_gradient<F: Scalar>(params: &LfwParams<F>, offset: i64) -> (F, ParamGrad<F>) {
    let base = params.pair_base(offset);
    let dist = F::from_u64(offset.unsigned_abs()).unwrap();
    let (v, dv) = decay(params.formula.is_power(), params.values[base], dist);
    let mut g = [F::zero(); MAX_PARAMS];
    g[base] = dv;
    g[base + 1] = F::one();
    (v + params.values[base + 1], g)
}

/// Forward-pass weight: the formula value floored at [`WEIGHT_FLOOR`]. When
/// the floor is active the gradient is zero.
pub fn clamped_weight_and_gradient<F: Scalar>(
    params: &LfwParams<F>,
    offset: i64,
    window: usize,
) -> Result<(F, ParamGrad<F>)> {
    check_offset(offset, window)?;
    let (v, g) = raw_weight_and_gradient(params, offset);
    let floor = F::from_f64_lossy(WEIGHT_FLOOR);
    if v < floor || !v.is_finite() {
        Ok((floor, [F::zero(); MAX_PARAMS]))
    } else {
        Ok((v, g))
    }
}

/// Weights (and their parameter gradients) for every offset in
/// `-window..=window`, recomputed whenever the parameters change.
#[derive(Debug, Clone)]
pub struct WeightTable<F> {
    window: usize,
    param_count: usize,
    lambdas: Vec<F>,
    grads: Vec<ParamGrad<F>>,
}

impl<F: Scalar> WeightTable<F> {
    /// All weights 1 and no learnable parameters (plain averaging).
    pub fn uniform(window: usize) -> Self {
        let mut lambdas = vec![F::one(); 2 * window + 1];
        lambdas[window] = F::zero();
        WeightTable {
            window,
            param_count: 0,
            lambdas,
            grads: vec![[F::zero(); MAX_PARAMS]; 2 * window + 1],
        }
    }

    pub fn from_params(params: &LfwParams<F>, window: usize) -> Self {
        let mut t = Self::uniform(window);
        t.refresh(params);
        t
    }

    /// Recomputes the table from new parameter values.
    pub fn refresh(&mut self, params: &LfwParams<F>) {
        self.param_count = params.formula().param_count();
        let r = self.window as i64;
        for offset in (-r..=r).filter(|&i| i != 0) {
            let (l, g) = clamped_weight_and_gradient(params, offset, self.window)
                .expect("offset within window");
            let slot = (offset + r) as usize;
            self.lambdas[slot] = l;
            self.grads[slot] = g;
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    #[inline]
    pub fn lambda(&self, offset: i64) -> F {
        self.lambdas[(offset + self.window as i64) as usize]
    }

    #[inline]
    pub fn grad(&self, offset: i64) -> &ParamGrad<F> {
        &self.grads[(offset + self.window as i64) as usize]
    }

    /// Weights for the present offsets `-left..=-1, 1..=right`.
    pub fn window_weights(&self, left: usize, right: usize) -> WeightVector<F> {
        assert!(left <= self.window && right <= self.window);
        let offsets: Vec<i64> = (-(left as i64)..0).chain(1..=right as i64).collect();
        let lambdas: Vec<F> = offsets.iter().map(|&o| self.lambda(o)).collect();
        let grads = offsets.iter().map(|&o| *self.grad(o)).collect();
        let z = lambdas.iter().fold(F::zero(), |acc, &l| acc + l);
        WeightVector {
            offsets,
            lambdas,
            grads,
            z,
            param_count: self.param_count,
        }
    }
}

/// Weights of the context words present around one center position.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<F> {
    pub offsets: Vec<i64>,
    pub lambdas: Vec<F>,
    pub grads: Vec<ParamGrad<F>>,
    /// Normalization factor: sum of `lambdas`.
    pub z: F,
    pub param_count: usize,
}

impl<F: Scalar> WeightVector<F> {
    pub fn compute(params: &LfwParams<F>, offsets: &[i64], window: usize) -> Result<Self> {
        let mut lambdas = Vec::with_capacity(offsets.len());
        let mut grads = Vec::with_capacity(offsets.len());
        for &o in offsets {
            let (l, g) = clamped_weight_and_gradient(params, o, window)?;
            lambdas.push(l);
            grads.push(g);
        }
        let z = lambdas.iter().fold(F::zero(), |acc, &l| acc + l);
        Ok(WeightVector {
            offsets: offsets.to_vec(),
            lambdas,
            grads,
            z,
            param_count: params.formula().param_count(),
        })
    }

    pub fn from_lambdas(lambdas: Vec<F>) -> Self {
        let z = lambdas.iter().fold(F::zero(), |acc, &l| acc + l);
        let n = lambdas.len();
        WeightVector {
            offsets: Vec::new(),
            lambdas,
            grads: vec![[F::zero(); MAX_PARAMS]; n],
            z,
            param_count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// `out = (1/Z) Σ λ_j u_j` over the present context rows.
///
/// Accumulates `λ_j u_j` in row order and divides by `Z` at the end, so unit
/// weights reproduce the plain mean bit for bit.
pub fn weighted_context_into<F: Scalar>(contexts: &[&[F]], lambdas: &[F], z: F, out: &mut [F]) {
    debug_assert_eq!(contexts.len(), lambdas.len());
    out.iter_mut().for_each(|x| *x = F::zero());
    for (row, &l) in contexts.iter().zip(lambdas) {
        for (o, &u) in out.iter_mut().zip(row.iter()) {
            *o += l * u;
        }
    }
    for o in out.iter_mut() {
        *o /= z;
    }
}

pub fn weighted_context<F: Scalar>(contexts: &[&[F]], weights: &WeightVector<F>) -> Result<Vec<F>> {
    let d = contexts.first().map(|c| c.len()).ok_or(Error::Config(
        "weighted context needs at least one context word".into(),
    ))?;
    if contexts.len() != weights.len() {
        return Err(Error::Dimension {
            expected: weights.len(),
            actual: contexts.len(),
        });
    }
    if let Some(bad) = contexts.iter().find(|c| c.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            actual: bad.len(),
        });
    }
    let mut out = vec![F::zero(); d];
    weighted_context_into(contexts, &weights.lambdas, weights.z, &mut out);
    Ok(out)
}

/// Parameter gradients from projections `s_j = g · u_j`:
/// `∂L/∂p = (1/Z) Σ_j (∂λ_j/∂p) (s_j − s̄)` where `s̄ = g · u_C = Σ λ_j s_j / Z`.
#[inline]
pub fn param_gradients_from_projections<F: Scalar>(
    projections: &[F],
    lambdas: &[F],
    grads: impl IntoIterator<Item = ParamGrad<F>>,
    z: F,
    param_count: usize,
) -> ParamGrad<F> {
    let mut mean = F::zero();
    for (&s, &l) in projections.iter().zip(lambdas) {
        mean += l * s;
    }
    mean /= z;
    let mut out = [F::zero(); MAX_PARAMS];
    for (&s, g) in projections.iter().zip(grads) {
        let centered = s - mean;
        for p in 0..param_count {
            out[p] += g[p] * centered;
        }
    }
    for o in out.iter_mut().take(param_count) {
        *o /= z;
    }
    out
}

/// Chain rule from `g = ∂L/∂u_C` back to the weight parameters.
pub fn context_gradient_wrt_params<F: Scalar>(
    g: &[F],
    contexts: &[&[F]],
    weights: &WeightVector<F>,
) -> Result<ParamGrad<F>> {
    if contexts.len() != weights.len() {
        return Err(Error::Dimension {
            expected: weights.len(),
            actual: contexts.len(),
        });
    }
    let mut projections = Vec::with_capacity(contexts.len());
    for c in contexts {
        if c.len() != g.len() {
            return Err(Error::Dimension {
                expected: g.len(),
                actual: c.len(),
            });
        }
        projections.push(dot(g, c));
    }
    Ok(param_gradients_from_projections(
        &projections,
        &weights.lambdas,
        weights.grads.iter().copied(),
        weights.z,
        weights.param_count,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub distance: usize,
    pub weight: f64,
    /// `None` for shared variants.
    pub side: Option<Side>,
}

/// Forward-pass weights at integer distances `1..=window`, normalized so each
/// curve sums to one. Split variants produce one curve per side.
pub fn export_weight_curve<F: Scalar>(
    params: &LfwParams<F>,
    window: usize,
) -> Result<Vec<CurvePoint>> {
    if window == 0 {
        return Err(Error::Config("window must be at least 1".into()));
    }
    let sides: &[(Option<Side>, i64)] = if params.formula().is_split() {
        &[(Some(Side::Left), -1), (Some(Side::Right), 1)]
    } else {
        &[(None, 1)]
    };
    let mut out = Vec::with_capacity(window * sides.len());
    for &(side, sign) in sides {
        let raw: Vec<f64> = (1..=window as i64)
            .map(|d| {
                clamped_weight_and_gradient(params, sign * d, window).map(|(l, _)| l.to_f64_lossy())
            })
            .collect::<Result<_>>()?;
        let total: f64 = raw.iter().sum();
        out.extend(raw.iter().enumerate().map(|(k, &w)| CurvePoint {
            distance: k + 1,
            weight: w / total,
            side,
        }));
    }
    Ok(out)
}

/// CSV with header `distance,weight` (or `distance,weight,side`).
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], mut w: W) -> Result<()> {
    let with_side = points.iter().any(|p| p.side.is_some());
    if with_side {
        writeln!(w, "distance,weight,side")?;
    } else {
        writeln!(w, "distance,weight")?;
    }
    for p in points {
        match p.side {
            Some(s) if with_side => writeln!(w, "{},{},{}", p.distance, p.weight, s)?,
            _ => writeln!(w, "{},{}", p.distance, p.weight)?,
        }
    }
    w.flush()?;
    Ok(())
}
