//! Documented test sets for each operator and endpoint.
//!
//! | family | used for |
//! |---|---|
//! | [`indicator`] | α of M, M^k, M_Φ, H, commutators, fractional; γ of the maximal types |
//! | [`graded_indicator`] | γ of H and commutators (log singularities at 0 and 1 resolved to 1e-250) |
//! | [`square_alpha`] | α of S_d: χ_[0,1) under a tree rooted at [0, 2^J) |
//! | [`square_gamma`] | γ of S_d: alternating staircase with S_d f = √k/2 on [2^-k, 2^{1-k}) |
//! | [`lacunary`] | γ of M̄_q: indicators of (8^-j, 8^{1-j}], one input per p |
//! | [`vector_indicator`] | α of M̄_q |
//! | [`tensor_indicator`] | α of M_R |

use std::sync::Arc;

use crate::dyadic::DyadicFamily;
use crate::error::{invalid, Result};
use crate::function::SampledFunction;
use crate::grid::{Grid, GridSpec};
use crate::operators::{self, VectorSampledFunction};

use super::{OperatorId, TestInput, TestSet};

/// Finest cell next to the breaks of [`graded_indicator`].
pub const GRADED_FINEST: f64 = 1e-250;
pub const GRADED_RATIO: f64 = 1.2;
/// Depth of the staircase in [`square_gamma`].
pub const SQUARE_GAMMA_DEPTH: u32 = 900;
/// Lacunarity base of [`lacunary`].
pub const LACUNARY_BASE: f64 = 8.0;
const LACUNARY_MAX_LEVELS: usize = 333;

/// `χ_[0,1]` on a hybrid grid.
pub fn indicator(spec: &GridSpec) -> Result<TestSet> {
    let g = Arc::new(Grid::build(spec)?);
    Ok(TestSet::single(
        "indicator[0,1]",
        TestInput::Scalar(SampledFunction::indicator(g, 0.0, 1.0)),
    ))
}

/// `χ_[0,1]` on a grid graded toward 0 and 1.
pub fn graded_indicator(extent: f64) -> Result<TestSet> {
    let g = Arc::new(Grid::graded(
        &[0.0, 1.0],
        GRADED_FINEST,
        GRADED_RATIO,
        extent,
    )?);
    Ok(TestSet::single(
        "graded-indicator[0,1]",
        TestInput::Scalar(SampledFunction::indicator(g, 0.0, 1.0)),
    ))
}

/// `S_d` over the tree rooted at `[0, 2^J)` applied to `χ_[0,1)`. Cells are
/// the dyadic shells `±[2^{j-1}, 2^j)`, on which `S_d χ` is constant.
pub fn square_alpha(levels: u32) -> Result<(OperatorId, TestSet)> {
    if !(1..=1000).contains(&levels) {
        return Err(invalid(
            "levels",
            format!("need 1 ≤ J ≤ 1000, got {levels}"),
        ));
    }
    let top = 2f64.powi(levels as i32);
    let mut edges: Vec<f64> = (0..=levels).map(|j| -(2f64.powi(j as i32))).rev().collect();
    edges.push(0.0);
    edges.extend((0..=levels).map(|j| 2f64.powi(j as i32)));
    let g = Arc::new(Grid::from_edges(edges)?);
    let f = SampledFunction::indicator(g, 0.0, 1.0);
    let family = DyadicFamily::new(0.0, top, levels)?;
    Ok((
        OperatorId::DyadicSquare(family),
        TestSet::single(
            format!("indicator[0,1) root [0,2^{levels})"),
            TestInput::Scalar(f),
        ),
    ))
}

/// Staircase on `[0, 1)` with value `3/2` on `[2^-k, 2^{1-k})` for odd `k`,
/// `0` for even `k`, and the average continued on `[0, 2^-J)`. Dyadic
/// averages of `[0, 2^-k)` alternate between `1` and `1/2`, so every
/// generation adds `1/4` to `(S_d f)^2`: `S_d f = √k/2` on the `k`-th shell
/// while `|f| ≤ 3/2`.
pub fn square_gamma(depth: u32) -> Result<(OperatorId, TestSet)> {
    if !(2..=1000).contains(&depth) {
        return Err(invalid("depth", format!("need 2 ≤ J ≤ 1000, got {depth}")));
    }
    let mut edges = vec![-1.0, 0.0];
    edges.extend((0..depth).rev().map(|k| 2f64.powi(-((k + 1) as i32))));
    edges.extend([1.0, 2.0]);
    let g = Arc::new(Grid::from_edges(edges)?);
    let inner = if depth.is_multiple_of(2) { 1.0 } else { 0.5 };
    let f = SampledFunction::from_fn(g, |x| {
        if !(0.0..1.0).contains(&x) {
            0.0
        } else {
            let k = (-x.log2()).ceil() as u32;
            if k > depth {
                inner
            } else if k % 2 == 1 {
                1.5
            } else {
                0.0
            }
        }
    })?;
    let family = DyadicFamily::new(0.0, 1.0, depth)?;
    Ok((
        OperatorId::DyadicSquare(family),
        TestSet::single(
            format!("alternating staircase depth {depth}"),
            TestInput::Scalar(f),
        ),
    ))
}

/// Levels of the lacunary input tuned for exponent `p`.
pub fn lacunary_levels(q: f64, p: f64) -> usize {
    ((1.6 * p / (q * LACUNARY_BASE.ln())).ceil() as usize + 20).min(LACUNARY_MAX_LEVELS)
}

/// One input per `p`: components `f_j = χ_(8^-j, 8^{1-j}]`, `j = 1..J(p)`,
/// on edges `0, ±8^{-m/4}, ±2`. `f̄_q = χ_(0,1]` while `M̄_q f ~ k^{1/q}` on
/// the `k`-th shell.
pub fn lacunary(q: f64, ps: &[f64]) -> Result<TestSet> {
    let mut levels: Vec<usize> = ps.iter().map(|&p| lacunary_levels(q, p)).collect();
    levels.sort_unstable();
    levels.dedup();
    let inputs = levels
        .into_iter()
        .map(|j| {
            let pos: Vec<f64> = (0..=4 * j)
                .map(|m| LACUNARY_BASE.powf(-(m as f64) / 4.0))
                .collect();
            let mut edges: Vec<f64> = vec![-2.0];
            edges.extend(pos.iter().map(|x| -x));
            edges.push(0.0);
            edges.extend(pos.iter().rev());
            edges.push(2.0);
            let g = Arc::new(Grid::from_edges(edges)?);
            let comps = (1..=j)
                .map(|k| {
                    let lo = LACUNARY_BASE.powi(-(k as i32));
                    SampledFunction::indicator(g.clone(), lo, lo * LACUNARY_BASE)
                })
                .collect();
            Ok(TestInput::Vector(VectorSampledFunction::new(comps, q)?))
        })
        .collect::<Result<Vec<_>>>()?;
    TestSet::new(format!("lacunary base {LACUNARY_BASE}"), inputs)
}

/// `(χ_[0,1])` as a one-component vector.
pub fn vector_indicator(spec: &GridSpec, q: f64) -> Result<TestSet> {
    let g = Arc::new(Grid::build(spec)?);
    let f = SampledFunction::indicator(g, 0.0, 1.0);
    Ok(TestSet::single(
        "indicator[0,1] (one component)",
        TestInput::Vector(VectorSampledFunction::new(vec![f], q)?),
    ))
}

/// `χ_[0,1]²` on `grid × grid`.
pub fn tensor_indicator(spec: &GridSpec) -> Result<TestSet> {
    let g = Arc::new(Grid::build(spec)?);
    Ok(TestSet::single(
        "indicator[0,1]^2",
        TestInput::Tensor(operators::tensor_indicator(g, 0.0, 1.0)),
    ))
}
