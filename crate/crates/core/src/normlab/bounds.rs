//! `β_min = max{γ, α/(p0-1)}`, verdicts against known sharp exponents, the
//! basis blow-up test and the Orlicz log-integral.

use std::fmt;

use crate::error::{invalid, Result};
use crate::quadrature::{integrate, ln_upper_gamma};

use super::{norm_sweep, NormSample, OperatorId, TestSet};
use crate::operators::Basis;

/// Known sharp exponents `β(p)` of `‖T‖_{L^p(w)} ≲ [w]_{A_p}^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// `1/(p-1)`
    Maximal,
    /// `max{1, 1/(p-1)}`
    CalderonZygmund,
    /// `(k+1)·max{1, 1/(p-1)}`
    Commutator(u32),
    /// `k/(p-1)`
    IteratedMaximal(u32),
    /// `max{1/q, 1/(p-1)}`
    VectorValued(f64),
    /// `max{1/2, 1/(p-1)}`
    DyadicSquare,
    /// `(1+λ)/(p-1)`
    OrliczMaximal(f64),
    /// Calderón's `N`, `1/(p-1)`.
    Calderon,
}

impl Reference {
    pub fn for_operator(op: &OperatorId) -> Option<Reference> {
        Some(match op {
            OperatorId::Maximal => Reference::Maximal,
            OperatorId::Hilbert => Reference::CalderonZygmund,
            OperatorId::Commutator(k) => Reference::Commutator(*k),
            OperatorId::IteratedMaximal(1) => Reference::Maximal,
            OperatorId::IteratedMaximal(k) => Reference::IteratedMaximal(*k),
            OperatorId::VectorValued(q) => Reference::VectorValued(*q),
            OperatorId::DyadicSquare(_) => Reference::DyadicSquare,
            OperatorId::OrliczMaximal(l) => Reference::OrliczMaximal(*l),
            OperatorId::BasisMaximal(Basis::OriginAnchored) => Reference::Calderon,
            OperatorId::BasisMaximal(Basis::Intervals) => Reference::Maximal,
            _ => return None,
        })
    }

    pub fn exponent(&self, p: f64) -> f64 {
        let e = 1.0 / (p - 1.0);
        match *self {
            Reference::Maximal | Reference::Calderon => e,
            Reference::CalderonZygmund => e.max(1.0),
            Reference::Commutator(k) => (k as f64 + 1.0) * e.max(1.0),
            Reference::IteratedMaximal(k) => k as f64 * e,
            Reference::VectorValued(q) => e.max(1.0 / q),
            Reference::DyadicSquare => e.max(0.5),
            Reference::OrliczMaximal(l) => (1.0 + l) * e,
        }
    }

    pub fn formula(&self) -> String {
        match *self {
            Reference::Maximal | Reference::Calderon => "1/(p-1)".into(),
            Reference::CalderonZygmund => "max{1,1/(p-1)}".into(),
            Reference::Commutator(k) => format!("{}max{{1,1/(p-1)}}", k + 1),
            Reference::IteratedMaximal(k) => format!("{k}/(p-1)"),
            Reference::VectorValued(q) => format!("max{{1/{q},1/(p-1)}}"),
            Reference::DyadicSquare => "max{1/2,1/(p-1)}".into(),
            Reference::OrliczMaximal(l) => format!("{}/(p-1)", 1.0 + l),
        }
    }

    pub fn anchor(&self) -> &'static str {
        match self {
            Reference::Maximal => "eq. (buckley)",
            Reference::CalderonZygmund => "eq. (CZ)",
            Reference::Commutator(1) => "eq. (commutator)",
            Reference::Commutator(_) => "eq. (k-commutator)",
            Reference::IteratedMaximal(_) => "eq. (k-maximal)",
            Reference::VectorValued(_) => "eq. (vector-valued-maximal)",
            Reference::DyadicSquare => "eq. (square-dyadic)",
            Reference::OrliczMaximal(_) => "Thm 3.2",
            Reference::Calderon => "§4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    MatchesSharp,
    StrictlyBelow,
    AboveReference,
    Unreferenced,
    NoConclusion,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MatchesSharp => "matches_sharp",
            Verdict::StrictlyBelow => "strictly_below",
            Verdict::AboveReference => "above_reference",
            Verdict::Unreferenced => "unreferenced",
            Verdict::NoConclusion => "no_conclusion",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundResult {
    pub alpha: f64,
    pub gamma: f64,
    pub p0: f64,
    /// `None` when no conclusion can be drawn.
    pub beta_min: Option<f64>,
    pub reference: Option<Reference>,
    /// Reference exponent evaluated at `p0`.
    pub reference_exponent: Option<f64>,
    /// Slack allowed when comparing with the reference.
    pub tolerance: f64,
    pub verdict: Verdict,
    pub note: String,
}

/// `max(tol_γ, tol_α/(p0-1))`: how far `β_min` can move when `α̂`, `γ̂` are
/// off by their tolerances.
pub fn propagated_tolerance(tol_alpha: f64, tol_gamma: f64, p0: f64) -> f64 {
    tol_gamma.max(tol_alpha / (p0 - 1.0))
}

fn verdict(beta: f64, reference: f64, tol: f64) -> Verdict {
    if beta > reference + tol {
        Verdict::AboveReference
    } else if beta < reference - tol {
        Verdict::StrictlyBelow
    } else {
        Verdict::MatchesSharp
    }
}

/// `β_min = max{γ, α/(p0-1)}` with a verdict against `reference`.
pub fn theorem_lower_bound(
    alpha: f64,
    gamma: f64,
    p0: f64,
    reference: Option<Reference>,
    tolerance: f64,
) -> Result<LowerBoundResult> {
    if !(p0 > 1.0 && p0.is_finite()) {
        return Err(invalid("p0", format!("need 1 < p0 < ∞, got {p0}")));
    }
    if !(alpha >= 0.0) {
        return Err(invalid("alpha", format!("must be ≥ 0, got {alpha}")));
    }
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", format!("must be ≥ 0, got {gamma}")));
    }
    if !(tolerance >= 0.0) {
        return Err(invalid("tolerance", "must be ≥ 0"));
    }
    let beta = gamma.max(alpha / (p0 - 1.0));
    let reference_exponent = reference.map(|r| r.exponent(p0));
    let verdict = match reference_exponent {
        Some(r) => verdict(beta, r, tolerance),
        None => Verdict::Unreferenced,
    };
    Ok(LowerBoundResult {
        alpha,
        gamma,
        p0,
        beta_min: Some(beta),
        reference,
        reference_exponent,
        tolerance,
        verdict,
        note: String::new(),
    })
}

/// Blow-up threshold: `‖M_B‖` at the smallest sampled `p` must exceed this
/// multiple of `‖M_B‖_2`.
pub const BLOWUP_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BasisLowerBound {
    pub result: LowerBoundResult,
    /// Norm samples over the sweep, plus `p = 2`.
    pub trace: Vec<NormSample>,
    /// `‖M_B‖_{p_min} / ‖M_B‖_2`.
    pub blowup_ratio: f64,
    pub blowup: bool,
}

/// If `‖M_B‖_p` blows up as `p → 1` then `β ≥ 1/(p0-1)`.
pub fn basis_lower_bound(
    basis: &Basis,
    p0: f64,
    ps: &[f64],
    set: &TestSet,
) -> Result<BasisLowerBound> {
    if !(p0 > 1.0 && p0.is_finite()) {
        return Err(invalid("p0", format!("need 1 < p0 < ∞, got {p0}")));
    }
    if ps.is_empty() || ps.iter().any(|&p| !(p > 1.0)) {
        return Err(invalid("p", "need a nonempty sweep with every p > 1"));
    }
    let op = match basis {
        Basis::Rectangles2D => OperatorId::StrongMaximal,
        b => OperatorId::BasisMaximal(b.clone()),
    };
    let mut all: Vec<f64> = ps.to_vec();
    if !all.contains(&2.0) {
        all.push(2.0);
    }
    let trace = norm_sweep(&op, set, &all)?;
    let at = |p: f64| trace.iter().find(|s| s.p == p).map(|s| s.norm).unwrap();
    let p_min = ps.iter().copied().fold(f64::INFINITY, f64::min);
    let blowup_ratio = at(p_min) / at(2.0);
    let blowup = blowup_ratio > BLOWUP_FACTOR;
    let reference = Reference::for_operator(&op);
    let beta = 1.0 / (p0 - 1.0);
    let (beta_min, verdict, note) = match (blowup, basis, reference) {
        (false, ..) => (
            None,
            Verdict::NoConclusion,
            "M_B stays bounded as p -> 1".to_string(),
        ),
        (true, Basis::Rectangles2D, _) => (
            Some(beta),
            Verdict::Unreferenced,
            "known upper exponent n/(p-1); sharp dependence is open".to_string(),
        ),
        (true, _, Some(r)) => (
            Some(beta),
            verdict(beta, r.exponent(p0), 0.0),
            String::new(),
        ),
        (true, _, None) => (Some(beta), Verdict::Unreferenced, String::new()),
    };
    Ok(BasisLowerBound {
        result: LowerBoundResult {
            alpha: 0.0,
            gamma: 0.0,
            p0,
            beta_min,
            reference: if blowup { reference } else { None },
            reference_exponent: reference.filter(|_| blowup).map(|r| r.exponent(p0)),
            tolerance: 0.0,
            verdict,
            note,
        },
        trace,
        blowup_ratio,
        blowup,
    })
}

/// Cut between quadrature and the analytic tail in `u = log t`.
const ORLICZ_SPLIT: f64 = 40.0;

/// `∫_1^∞ log^{pλ}(e+t) t^{-ε} dt/t` and the budget `(1/ε)^{λp+1}`.
///
/// With `t = e^u` the integrand is `log^{pλ}(e+e^u) e^{-εu}`; Gauss–Legendre
/// covers `u ≤ 40` and beyond that `log(e+e^u) = u` to double precision, so
/// the rest is `Γ(pλ+1, 40ε)/ε^{pλ+1}`.
pub fn orlicz_integral_bound(lambda: f64, p: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("need 0 < ε < 1, got {epsilon}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be ≥ 0, got {lambda}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("need 1 < p < ∞, got {p}")));
    }
    let m = p * lambda;
    let body = integrate(
        |u| {
            let l = if u > 30.0 {
                u + (1.0 - u).exp()
            } else {
                (std::f64::consts::E + u.exp()).ln()
            };
            (m * l.ln() - epsilon * u).exp()
        },
        0.0,
        ORLICZ_SPLIT,
        80,
        16,
    );
    let a = m + 1.0;
    let tail = (ln_upper_gamma(a, ORLICZ_SPLIT * epsilon) - a * epsilon.ln()).exp();
    Ok((body + tail, epsilon.powf(-a)))
}
