//! Rubio de Francia iteration `R h = Σ_k 2^{-k} M^k h / N^k` and checks of
//! the properties used to build `A_1` weights from it.
//!
//! `N` is the model [`maximal_norm_model`], an over-estimate of `‖M‖_p`.

use crate::error::{invalid, Result};
use crate::function::SampledFunction;
use crate::normlab::{
    linear_fit, maximal_norm_model, norm_sweep, LinearFit, NormSample, OperatorId, TestSet,
};
use crate::operators::{hl_maximal, Basis};
use crate::par;
use crate::quadrature::Primitive;
use crate::quadrature::{ln_lp_power, ln_tail_integral, lp_norm};
use crate::weights::{conjugate, Weight, DEFAULT_FLOOR};

/// Tolerance behind [`DEFAULT_TRUNCATION`]: `⌈log2(1/10^-6)⌉ + 1`.
pub const DEFAULT_TRUNCATION: u32 = 21;

#[derive(Debug, Clone)]
pub struct RdFResult {
    /// `R_K h` as a weight (floored, without tail).
    pub output: Weight,
    /// `R_K h` before flooring.
    pub series: SampledFunction,
    /// Exponent whose norm model normalizes the series.
    pub p: f64,
    pub truncation: u32,
    pub norm_estimate: f64,
    /// `2^{-K+1}‖h‖_p`.
    pub residual_bound: f64,
    /// `M^k h` for `k = 0..=K+1` (with tails).
    pub iterates: Vec<SampledFunction>,
}

fn iterate(h: &SampledFunction, norm_p: f64, k: u32) -> Result<RdFResult> {
    if h.values().iter().any(|&v| v < 0.0) {
        return Err(invalid("h", "input must be non-negative"));
    }
    if h.values().iter().all(|&v| v == 0.0) {
        return Err(invalid("h", "input vanishes identically"));
    }
    if k < 1 {
        return Err(invalid("K", "truncation must be at least 1"));
    }
    let n = maximal_norm_model(norm_p)?;
    let mut iterates = Vec::with_capacity(k as usize + 2);
    iterates.push(h.clone());
    for j in 1..=k as usize + 1 {
        let next = hl_maximal(&iterates[j - 1]);
        iterates.push(next);
    }
    let mut values = vec![0.0; h.len()];
    for (j, m) in iterates.iter().take(k as usize + 1).enumerate() {
        let c = (2.0 * n).powi(-(j as i32));
        for (v, x) in values.iter_mut().zip(m.values()) {
            *v += c * x;
        }
    }
    let series = SampledFunction::new(h.grid().clone(), values)?;
    let output = Weight::new(series.clone(), DEFAULT_FLOOR)?;
    Ok(RdFResult {
        output,
        series,
        p: norm_p,
        truncation: k,
        norm_estimate: n,
        residual_bound: 2f64.powi(1 - k as i32) * lp_norm(h, norm_p)?,
        iterates,
    })
}

/// `R_K h = Σ_{k=0}^{K} 2^{-k} M^k h / N(p)^k`.
pub fn rdf_iterate(h: &SampledFunction, p: f64, k: u32) -> Result<RdFResult> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("need 1 < p < ∞, got {p}")));
    }
    iterate(h, p, k)
}

/// `R'_K h`, normalized by `N(p')`; its properties hold in `L^{p'}`.
pub fn rdf_dual_iterate(h: &SampledFunction, p: f64, k: u32) -> Result<RdFResult> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("need 1 < p < ∞, got {p}")));
    }
    iterate(h, conjugate(p), k)
}

impl RdFResult {
    /// (A): `h ≤ R h` at every node.
    pub fn property_a(&self) -> bool {
        self.series
            .values()
            .iter()
            .zip(self.iterates[0].values())
            .all(|(r, h)| r >= h)
    }

    /// (B): returns `(‖R_K h‖_p, (2 + 2^{-K+1})‖h‖_p)`.
    ///
    /// Outside the grid the series is bounded by Minkowski over the tails of
    /// the iterates, so the left value is an upper estimate of the true norm.
    pub fn property_b(&self) -> Result<(f64, f64)> {
        let p = self.p;
        let h = &self.iterates[0];
        let grid = h.grid();
        let inner = ln_lp_power(&self.series, p)?.exp();
        let mut outer = [0.0f64; 2];
        for (j, m) in self
            .iterates
            .iter()
            .take(self.truncation as usize + 1)
            .enumerate()
        {
            let Some(tail) = m.tail() else { continue };
            let c = (2.0 * self.norm_estimate).powi(-(j as i32));
            let sides = [
                (tail.coeff_left, grid.lo().abs()),
                (tail.coeff_right, grid.hi().abs()),
            ];
            for (o, (coeff, extent)) in outer.iter_mut().zip(sides) {
                *o += c * (ln_tail_integral(tail, coeff, extent, p)? / p).exp();
            }
        }
        let total = inner + outer.iter().map(|o| o.powf(p)).sum::<f64>();
        let bound = (2.0 + 2f64.powi(1 - self.truncation as i32)) * lp_norm(h, p)?;
        Ok((total.powf(1.0 / p), bound))
    }

    /// (C): `max_x [M(R_K h) - 2^{-K} M^{K+1}h / N^K] / R_K h`, to be compared
    /// with `2N`.
    pub fn property_c(&self) -> f64 {
        let k = self.truncation as i32;
        let m = hl_maximal(&self.series);
        let last = &self.iterates[k as usize + 1];
        let corr = 2f64.powi(-k) * self.norm_estimate.powi(-k);
        m.values()
            .iter()
            .zip(last.values())
            .zip(self.series.values())
            .filter(|(_, &r)| r > 0.0)
            .map(|((mv, lv), r)| (mv - corr * lv) / r)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JensenReport {
    pub theta: f64,
    /// Exponent of the `A_q` constants compared, `q = p0'`.
    pub q: f64,
    /// `max_Q [A_Q(v^θ) / A_Q(v)^θ] - 1`; Jensen makes this `≤ 0`.
    pub worst_excess: f64,
    pub sets: usize,
}

/// Per-set Jensen step `[v^θ]_{A_q, Q} ≤ [v]_{A_q, Q}^θ` with `θ = (p0-p)/(p0-1)`
/// and `q = p0'`.
pub fn jensen_check(v: &Weight, p0: f64, p: f64, family: &Basis) -> Result<JensenReport> {
    if !(p > 1.0 && p < p0) {
        return Err(invalid("p", format!("need 1 < p < p0 = {p0}, got {p}")));
    }
    let theta = (p0 - p) / (p0 - 1.0);
    let q = conjugate(p0);
    let vt = v.pow(theta)?;
    let grid = v.grid();
    let sets = family.enumerate(grid)?;
    let (sv, svt) = (v.dual(q)?, vt.dual(q)?);
    let prims =
        [v.values(), sv.values(), vt.values(), svt.values()].map(|w| Primitive::new(grid, w));
    let ap =
        |w: &Primitive, s: &Primitive, lo, hi| w.average(lo, hi) * s.average(lo, hi).powf(q - 1.0);
    let excess = par::map_slice(&sets, |&(lo, hi)| {
        let a = ap(&prims[0], &prims[1], lo, hi);
        let b = ap(&prims[2], &prims[3], lo, hi);
        b / a.powf(theta) - 1.0
    });
    let worst = excess.into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(JensenReport {
        theta,
        q,
        worst_excess: worst,
        sets: sets.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `p < p0`, budget `N(p)^{β(p0-p)}`.
    Direct,
    /// `p > p0`, budget `N(p')^{β(p-p0)/(p-1)}`.
    Dual,
    /// `p = p0`, budget 1.
    Endpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainPoint {
    pub p: f64,
    pub branch: Branch,
    pub norm: f64,
    pub budget: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfChainReport {
    pub p0: f64,
    pub beta: f64,
    pub points: Vec<ChainPoint>,
    pub max_ratio: f64,
    /// Slope of `log ratio` against `-log(p-1)` over the direct branch.
    pub trend: Option<LinearFit>,
}

/// Largest `|trend slope|` accepted as "no growth".
pub const TREND_TOLERANCE: f64 = 0.1;

impl CfChainReport {
    pub fn bounded(&self) -> bool {
        self.trend.is_some_and(|t| t.slope.abs() <= TREND_TOLERANCE)
    }
}

/// Ratios `‖Tf‖_p / (budget(p)·‖f‖_p)` maximized over `set`.
pub fn cf_chain_check(
    op: &OperatorId,
    p0: f64,
    beta: f64,
    ps: &[f64],
    set: &TestSet,
) -> Result<CfChainReport> {
    if !(p0 > 1.0 && p0.is_finite()) {
        return Err(invalid("p0", format!("need 1 < p0 < ∞, got {p0}")));
    }
    if !(beta >= 0.0) {
        return Err(invalid("beta", "must be ≥ 0"));
    }
    let samples: Vec<NormSample> = norm_sweep(op, set, ps)?;
    let mut points = Vec::with_capacity(ps.len());
    for s in samples.iter().filter(|s| !s.divergent) {
        let p = s.p;
        let (branch, budget) = if p < p0 {
            (Branch::Direct, maximal_norm_model(p)?.powf(beta * (p0 - p)))
        } else if p > p0 {
            (
                Branch::Dual,
                maximal_norm_model(conjugate(p))?.powf(beta * (p - p0) / (p - 1.0)),
            )
        } else {
            (Branch::Endpoint, 1.0)
        };
        points.push(ChainPoint {
            p,
            branch,
            norm: s.norm,
            budget,
            ratio: s.norm / budget,
        });
    }
    let direct: Vec<&ChainPoint> = points
        .iter()
        .filter(|c| c.branch == Branch::Direct)
        .collect();
    let trend = if direct.len() >= 2 {
        let xs: Vec<f64> = direct.iter().map(|c| -(c.p - 1.0).ln()).collect();
        let ys: Vec<f64> = direct.iter().map(|c| c.ratio.ln()).collect();
        Some(linear_fit(&xs, &ys)?)
    } else {
        None
    };
    let max_ratio = points.iter().map(|c| c.ratio).fold(0.0, f64::max);
    Ok(CfChainReport {
        p0,
        beta,
        points,
        max_ratio,
        trend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use crate::normlab::{default_alpha_ps, families};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn bump() -> SampledFunction {
        let g = Arc::new(Grid::build(&GridSpec::hybrid(2.0, 1024.0, 64, 1.2)).unwrap());
        SampledFunction::from_fn(g, |x| if x.abs() < 1.0 { 1.0 + x } else { 0.0 }).unwrap()
    }

    #[test]
    fn two_term_series() {
        let h = bump();
        let r = rdf_iterate(&h, 1.5, 1).unwrap();
        let n = maximal_norm_model(1.5).unwrap();
        let m = hl_maximal(&h);
        for ((r, h), m) in r.series.values().iter().zip(h.values()).zip(m.values()) {
            assert_relative_eq!(*r, h + m / (2.0 * n), max_relative = 1e-15);
        }
        assert!(rdf_iterate(&h.scale(-1.0), 1.5, 1).is_err());
        assert!(rdf_iterate(&h, 1.0, 1).is_err());
    }

    #[test]
    fn self_dual_at_two() {
        let h = bump();
        let a = rdf_iterate(&h, 2.0, 8).unwrap();
        let b = rdf_dual_iterate(&h, 2.0, 8).unwrap();
        assert_eq!(a.series, b.series);
    }

    #[test]
    fn properties_on_bump() {
        let h = bump();
        for p in [1.25, 1.5, 2.0, 4.0] {
            let r = rdf_iterate(&h, p, DEFAULT_TRUNCATION).unwrap();
            assert!(r.property_a());
            let (norm, bound) = r.property_b().unwrap();
            assert!(norm <= bound, "p={p}: {norm} > {bound}");
            assert!(r.property_c() <= 2.0 * r.norm_estimate * (1.0 + 1e-3));
        }
    }

    #[test]
    fn jensen_on_rdf_weight() {
        let g = Arc::new(Grid::build(&GridSpec::uniform(2.0, 48)).unwrap());
        let h = SampledFunction::from_fn(g, |x| (3.0 * x).sin().abs() + 0.1).unwrap();
        let v = rdf_iterate(&h, 2.0, 10).unwrap().output;
        let rep = jensen_check(&v, 2.0, 1.3, &Basis::Intervals).unwrap();
        assert!(rep.worst_excess <= 1e-9);
        assert!(jensen_check(&v, 2.0, 2.5, &Basis::Intervals).is_err());
    }

    #[test]
    fn chain_trend() {
        let set = families::indicator(&GridSpec::hybrid(2.0, 2f64.powi(16), 64, 1.1)).unwrap();
        let ps = default_alpha_ps();
        let ok = cf_chain_check(&OperatorId::Maximal, 2.0, 1.0, &ps, &set).unwrap();
        assert!(ok.bounded(), "{:?}", ok.trend);
        let low = cf_chain_check(&OperatorId::Maximal, 2.0, 0.5, &ps, &set).unwrap();
        assert!(low.trend.unwrap().slope >= 0.4);
        let at = cf_chain_check(&OperatorId::Maximal, 2.0, 1.0, &[2.0], &set).unwrap();
        assert_eq!(at.points[0].branch, Branch::Endpoint);
        assert_eq!(at.points[0].ratio, at.points[0].norm);
    }
}
