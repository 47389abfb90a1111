//! Operator-norm lower estimates, endpoint-order fits and the lower-bound
//! calculator for weighted exponents.
//!
//! A norm estimate is `max_f ‖Tf‖_p / ‖f‖_p` over a finite, named test set.
//! Operators are applied once per input; the resulting samples (with their
//! tail models) are then evaluated at every `p` of a sweep.

mod bounds;
pub mod families;
mod fit;

use std::fmt;

use crate::dyadic::DyadicFamily;
use crate::error::{invalid, LabError, Result};
use crate::function::{SampledFunction, SampledFunction2D};
use crate::operators::{
    basis_maximal, commutator_k, dyadic_square, frac_integral, frac_maximal, hilbert,
    iterated_maximal, orlicz_maximal, strong_maximal_2d, vv_maximal, Basis, VectorSampledFunction,
};
use crate::orlicz::OrliczGauge;
use crate::par;
use crate::quadrature::{lp_norm, lp_norm_2d};

pub use bounds::{
    basis_lower_bound, orlicz_integral_bound, propagated_tolerance, theorem_lower_bound,
    BasisLowerBound, LowerBoundResult, Reference, Verdict, BLOWUP_FACTOR,
};
pub use fit::{
    fit_alpha, fit_gamma, linear_fit, ExponentEstimate, ExponentKind, LinearFit, MIN_SAMPLES,
};

/// Samples with `(p-1)·log R` below this are flagged when the output carries
/// no tail model.
pub const SATURATION_THRESHOLD: f64 = 3.0;

/// `p - 1 = 2^{-2}, …, 2^{-7}`.
pub fn default_alpha_ps() -> Vec<f64> {
    (2..=7).map(|k| 1.0 + 2f64.powi(-k)).collect()
}

pub fn default_gamma_ps() -> Vec<f64> {
    vec![4.0, 8.0, 16.0, 32.0, 64.0]
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorId {
    Identity,
    Maximal,
    IteratedMaximal(u32),
    OrliczMaximal(f64),
    Hilbert,
    /// `k`-th iterated commutator of `H` with `log|x|`.
    Commutator(u32),
    DyadicSquare(DyadicFamily),
    VectorValued(f64),
    /// `M_α` as a map `L^p → L^q`, `1/q = 1/p - α`.
    FractionalMaximal(f64),
    FractionalIntegral(f64),
    BasisMaximal(Basis),
    StrongMaximal,
}

impl OperatorId {
    /// Short label used in tables.
    pub fn label(&self) -> String {
        match self {
            OperatorId::Identity => "I".into(),
            OperatorId::Maximal => "M".into(),
            OperatorId::IteratedMaximal(k) => format!("M^{k}"),
            OperatorId::OrliczMaximal(l) => format!("M_Phi({l})"),
            OperatorId::Hilbert => "H".into(),
            OperatorId::Commutator(k) => format!("H_b^{k}"),
            OperatorId::DyadicSquare(_) => "S_d".into(),
            OperatorId::VectorValued(q) => format!("Mbar_{q}"),
            OperatorId::FractionalMaximal(a) => format!("M_alpha({a})"),
            OperatorId::FractionalIntegral(a) => format!("I_alpha({a})"),
            OperatorId::BasisMaximal(Basis::OriginAnchored) => "N".into(),
            OperatorId::BasisMaximal(Basis::Intervals) => "M".into(),
            OperatorId::BasisMaximal(_) => "M_B".into(),
            OperatorId::StrongMaximal => "M_R".into(),
        }
    }

    /// Exponent of the output space for input exponent `p`.
    pub fn target_exponent(&self, p: f64) -> Option<f64> {
        match self {
            OperatorId::FractionalMaximal(a) | OperatorId::FractionalIntegral(a) => {
                let inv = 1.0 / p - a;
                (inv > 0.0).then(|| 1.0 / inv)
            }
            _ => Some(p),
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone)]
pub enum TestInput {
    Scalar(SampledFunction),
    Vector(VectorSampledFunction),
    Tensor(SampledFunction2D),
}

impl TestInput {
    fn extent(&self) -> f64 {
        match self {
            TestInput::Scalar(f) => f.grid().extent(),
            TestInput::Vector(v) => v.grid().extent(),
            TestInput::Tensor(t) => t.grid_x().extent().max(t.grid_y().extent()),
        }
    }

    fn norm(&self, p: f64) -> Result<f64> {
        match self {
            TestInput::Scalar(f) => lp_norm(f, p),
            TestInput::Vector(v) => lp_norm(&v.aggregate(), p),
            TestInput::Tensor(t) => lp_norm_2d(t, p),
        }
    }
}

/// A named finite set of test inputs.
#[derive(Debug, Clone)]
pub struct TestSet {
    pub id: String,
    pub inputs: Vec<TestInput>,
}

impl TestSet {
    pub fn new(id: impl Into<String>, inputs: Vec<TestInput>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(LabError::EmptyFamily("test set has no inputs"));
        }
        Ok(TestSet {
            id: id.into(),
            inputs,
        })
    }

    pub fn single(id: impl Into<String>, input: TestInput) -> Self {
        TestSet {
            id: id.into(),
            inputs: vec![input],
        }
    }
}

#[derive(Debug, Clone)]
enum Output {
    Scalar(SampledFunction),
    Tensor(SampledFunction2D),
}

/// One input together with its image under an operator.
#[derive(Debug, Clone)]
pub struct Applied {
    op: OperatorId,
    input: TestInput,
    output: Output,
}

/// Outcome of evaluating a ratio at one `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub value: f64,
    pub saturated: bool,
    pub divergent: bool,
}

impl Applied {
    pub fn output(&self) -> Option<&SampledFunction> {
        match &self.output {
            Output::Scalar(f) => Some(f),
            Output::Tensor(_) => None,
        }
    }

    /// `‖Tf‖_q / ‖f‖_p` with `q` the operator's target exponent.
    pub fn ratio(&self, p: f64) -> Result<Ratio> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid("p", format!("need 1 < p < ∞, got {p}")));
        }
        let divergent = Ratio {
            value: f64::INFINITY,
            saturated: false,
            divergent: true,
        };
        let Some(q) = self.op.target_exponent(p) else {
            return Ok(divergent);
        };
        let out_norm = match &self.output {
            Output::Scalar(g) => lp_norm(g, q),
            Output::Tensor(g) => lp_norm_2d(g, q),
        };
        let out_norm = match out_norm {
            Ok(v) => v,
            Err(LabError::DivergentTail { .. }) => return Ok(divergent),
            Err(e) => return Err(e),
        };
        let in_norm = self.input.norm(p)?;
        if !(in_norm > 0.0) {
            return Err(invalid("test_set", "test input has zero norm"));
        }
        Ok(Ratio {
            value: out_norm / in_norm,
            saturated: self.saturated(p),
            divergent: false,
        })
    }

    fn saturated(&self, p: f64) -> bool {
        let (has_tail, edge_value, extent) = match &self.output {
            Output::Scalar(g) => {
                let v = g.values();
                (
                    g.tail().is_some(),
                    v[0].abs().max(v[v.len() - 1].abs()),
                    g.grid().extent(),
                )
            }
            Output::Tensor(g) => (
                g.factors()
                    .is_some_and(|(a, b)| a.tail().is_some() && b.tail().is_some()),
                1.0,
                g.grid_x().extent(),
            ),
        };
        !has_tail && edge_value > 0.0 && (p - 1.0) * extent.ln() < SATURATION_THRESHOLD
    }
}

fn scalar(input: &TestInput, op: &OperatorId) -> Result<SampledFunction> {
    match input {
        TestInput::Scalar(f) => Ok(f.clone()),
        _ => Err(invalid("test_set", format!("{op} acts on scalar inputs"))),
    }
}

/// Apply `op` to one input.
pub fn apply(op: &OperatorId, input: &TestInput) -> Result<Applied> {
    let output = match op {
        OperatorId::StrongMaximal => match input {
            TestInput::Tensor(t) => Output::Tensor(strong_maximal_2d(t)?.certified),
            _ => return Err(invalid("test_set", "M_R acts on tensor inputs")),
        },
        OperatorId::BasisMaximal(Basis::Rectangles2D) => match input {
            TestInput::Tensor(t) => Output::Tensor(strong_maximal_2d(t)?.certified),
            _ => return Err(invalid("test_set", "rectangle bases act on tensor inputs")),
        },
        OperatorId::VectorValued(q) => match input {
            TestInput::Vector(v) => {
                if v.q() != *q {
                    return Err(invalid(
                        "q",
                        format!("input built for q = {}, operator has q = {q}", v.q()),
                    ));
                }
                let g = vv_maximal(v);
                let compact = v.components().iter().all(|c| c.is_compactly_supported());
                Output::Scalar(if compact {
                    g.with_fitted_tail(0.0, 1.0)?
                } else {
                    g
                })
            }
            TestInput::Scalar(f) => {
                let v = VectorSampledFunction::new(vec![f.clone()], *q)?;
                let g = vv_maximal(&v);
                Output::Scalar(if f.is_compactly_supported() {
                    g.with_fitted_tail(0.0, 1.0)?
                } else {
                    g
                })
            }
            TestInput::Tensor(_) => {
                return Err(invalid("test_set", "Mbar_q acts on vector inputs"))
            }
        },
        _ => {
            let f = scalar(input, op)?;
            Output::Scalar(match op {
                OperatorId::Identity => f,
                OperatorId::Maximal => crate::operators::hl_maximal(&f),
                OperatorId::IteratedMaximal(k) => iterated_maximal(&f, *k)?,
                OperatorId::OrliczMaximal(l) => {
                    orlicz_maximal(&f, &OrliczGauge::new(*l)?, &Basis::Intervals)?
                }
                OperatorId::Hilbert => hilbert(&f),
                OperatorId::Commutator(k) => commutator_k(&f, *k)?,
                OperatorId::DyadicSquare(d) => {
                    // a nonzero mean leaves averages ~ 1/|Q| on ancestor cubes
                    let s = dyadic_square(&f, d)?;
                    if f.is_compactly_supported() {
                        s.with_fitted_tail(0.0, 1.0)?
                    } else {
                        s
                    }
                }
                OperatorId::FractionalMaximal(a) => frac_maximal(&f, *a)?,
                OperatorId::FractionalIntegral(a) => frac_integral(&f.abs(), *a)?,
                OperatorId::BasisMaximal(b) => basis_maximal(&f, b)?,
                OperatorId::StrongMaximal | OperatorId::VectorValued(_) => unreachable!(),
            })
        }
    };
    Ok(Applied {
        op: op.clone(),
        input: input.clone(),
        output,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSample {
    pub p: f64,
    /// `max_f ‖Tf‖/‖f‖` over the test set.
    pub norm: f64,
    pub test_set: String,
    /// Extent of the grid that attained the maximum.
    pub extent: f64,
    pub saturated: bool,
    /// Every input hit a divergent tail integral; excluded from fits.
    pub divergent: bool,
}

/// Evaluate pre-applied inputs at every `p`.
pub fn evaluate(applied: &[Applied], set_id: &str, ps: &[f64]) -> Result<Vec<NormSample>> {
    if applied.is_empty() {
        return Err(LabError::EmptyFamily("test set has no inputs"));
    }
    let rows: Vec<Result<NormSample>> = par::map_slice(ps, |&p| {
        let mut best: Option<(Ratio, f64)> = None;
        for a in applied {
            let r = a.ratio(p)?;
            if r.divergent {
                continue;
            }
            if best.is_none_or(|(b, _)| r.value > b.value) {
                best = Some((r, a.input.extent()));
            }
        }
        Ok(match best {
            Some((r, extent)) => NormSample {
                p,
                norm: r.value,
                test_set: set_id.to_string(),
                extent,
                saturated: r.saturated,
                divergent: false,
            },
            None => NormSample {
                p,
                norm: f64::INFINITY,
                test_set: set_id.to_string(),
                extent: applied[0].input.extent(),
                saturated: false,
                divergent: true,
            },
        })
    });
    rows.into_iter().collect()
}

/// Apply `op` to every input of `set` and evaluate at each `p`.
pub fn norm_sweep(op: &OperatorId, set: &TestSet, ps: &[f64]) -> Result<Vec<NormSample>> {
    let applied = set
        .inputs
        .iter()
        .map(|f| apply(op, f))
        .collect::<Result<Vec<_>>>()?;
    evaluate(&applied, &set.id, ps)
}

/// Single-`p` version of [`norm_sweep`].
pub fn norm_lower(op: &OperatorId, p: f64, set: &TestSet) -> Result<NormSample> {
    Ok(norm_sweep(op, set, &[p])?.remove(0))
}

/// Exact `L^p` norm of the uncentered maximal operator on the line: the root
/// of `(p-1)x^p - p x^{p-1} - 1 = 0` in `x > p/(p-1)`.
pub fn maximal_norm_exact(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("need 1 < p < ∞, got {p}")));
    }
    // divided by x^{p-1}: g(x) = (p-1)x - p - x^{1-p}, increasing for x > 0
    let g = |x: f64| (p - 1.0) * x - p - x.powf(1.0 - p);
    let (mut lo, mut hi) = (1.0, (p + 1.0) / (p - 1.0) + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Upper model `2p/(p-1)` for `‖M‖_p`, used to normalize the Rubio de Francia
/// series. It dominates [`maximal_norm_exact`] for every `p > 1` and is
/// asymptotically sharp as `p → 1`.
pub fn maximal_norm_model(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("need 1 < p < ∞, got {p}")));
    }
    Ok(2.0 * p / (p - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn indicator() -> TestSet {
        let g = Arc::new(Grid::build(&GridSpec::hybrid(2.0, 2f64.powi(16), 64, 1.1)).unwrap());
        TestSet::single(
            "chi",
            TestInput::Scalar(SampledFunction::indicator(g, 0.0, 1.0)),
        )
    }

    #[test]
    fn maximal_ratio_at_two() {
        let s = norm_lower(&OperatorId::Maximal, 2.0, &indicator()).unwrap();
        assert!(!s.saturated);
        // ∫(Mχ)² = 1 + 2∫_1^∞ x^{-2} = 3
        assert_relative_eq!(s.norm, 3f64.sqrt(), max_relative = 1e-3);
    }

    #[test]
    fn identity_ratio_is_one() {
        for s in norm_sweep(&OperatorId::Identity, &indicator(), &[1.1, 2.0, 7.0]).unwrap() {
            assert_relative_eq!(s.norm, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn exact_maximal_norms() {
        assert_relative_eq!(
            maximal_norm_exact(2.0).unwrap(),
            1.0 + 2f64.sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(maximal_norm_exact(1.5).unwrap(), 4.0, max_relative = 1e-12);
        for k in 1..200 {
            let p = 1.0 + 0.01 * k as f64 * k as f64 / 10.0;
            assert!(maximal_norm_model(p).unwrap() >= maximal_norm_exact(p).unwrap());
        }
    }

    #[test]
    fn fractional_target_exponent() {
        let op = OperatorId::FractionalMaximal(0.5);
        assert_relative_eq!(op.target_exponent(1.5).unwrap(), 6.0, max_relative = 1e-14);
        assert!(op.target_exponent(2.0).is_none());
        let s = norm_lower(&op, 2.5, &indicator()).unwrap();
        assert!(s.divergent);
    }

    #[test]
    fn saturation_without_tail() {
        let set = indicator();
        let TestInput::Scalar(f) = &set.inputs[0] else {
            unreachable!()
        };
        let m = crate::operators::hl_maximal(f).without_tail();
        let a = Applied {
            op: OperatorId::Maximal,
            input: set.inputs[0].clone(),
            output: Output::Scalar(m),
        };
        assert!(a.ratio(1.1).unwrap().saturated);
        assert!(!a.ratio(2.0).unwrap().saturated);
    }
}
