//! Midpoint quadrature on grids, semi-analytic tails and Gauss–Legendre rules.

use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{invalid, LabError, Result};
use crate::function::{SampledFunction, SampledFunction2D, TailModel};
use crate::grid::Grid;

/// Prefix integrals `P[k] = ∫_{e_anchor}^{e_k} f`, anchored at the edge closest
/// to the origin. Integrals over runs of cells near 0 are then differences of
/// small numbers, so a cell of width `2^-900` next to the origin is not lost
/// against the `O(1)` mass elsewhere.
#[derive(Debug, Clone)]
pub struct Cumulative {
    prefix: Vec<f64>,
}

impl Cumulative {
    pub fn new(grid: &Grid, values: &[f64]) -> Self {
        Self::from_masses(
            grid.anchor(),
            values.iter().zip(grid.widths()).map(|(v, w)| v * w),
        )
    }

    /// Prefix sums of `|f|`.
    pub fn abs(grid: &Grid, values: &[f64]) -> Self {
        Self::from_masses(
            grid.anchor(),
            values.iter().zip(grid.widths()).map(|(v, w)| v.abs() * w),
        )
    }

    /// Prefix sums of already-weighted cell masses.
    pub fn from_masses(anchor: usize, masses: impl ExactSizeIterator<Item = f64>) -> Self {
        let masses: Vec<f64> = masses.collect();
        let n = masses.len();
        let mut prefix = vec![0.0; n + 1];
        for k in anchor + 1..=n {
            prefix[k] = prefix[k - 1] + masses[k - 1];
        }
        for k in (0..anchor).rev() {
            prefix[k] = prefix[k + 1] - masses[k];
        }
        Cumulative { prefix }
    }

    /// `∫` over cells `a..b` (edge indices, `a <= b`).
    #[inline]
    pub fn between(&self, a: usize, b: usize) -> f64 {
        self.prefix[b] - self.prefix[a]
    }

    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        self.prefix[k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.prefix
    }

    pub fn total(&self) -> f64 {
        self.prefix[self.prefix.len() - 1] - self.prefix[0]
    }
}

/// Exact integrals of a piecewise-constant function over arbitrary intervals.
///
/// Pieces inside a single cell are computed as `v · length`, never as a
/// difference of prefix sums, so deep dyadic sub-cubes keep full precision.
#[derive(Debug, Clone)]
pub struct Primitive<'a> {
    grid: &'a Grid,
    values: &'a [f64],
    cum: Cumulative,
}

impl<'a> Primitive<'a> {
    pub fn new(grid: &'a Grid, values: &'a [f64]) -> Self {
        Primitive {
            grid,
            values,
            cum: Cumulative::new(grid, values),
        }
    }

    /// `∫_lo^hi f`, with the interval clipped to the grid support.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let g = self.grid;
        let (lo, hi) = (lo.max(g.lo()), hi.min(g.hi()));
        if !(hi > lo) {
            return 0.0;
        }
        let (a, b) = (g.locate(lo).unwrap(), g.locate(hi).unwrap());
        let e = g.edges();
        if a == b {
            return self.values[a] * (hi - lo);
        }
        // a cell that `hi` only touches at its left edge contributes nothing
        let b_part = if hi > e[b] {
            self.values[b] * (hi - e[b])
        } else {
            0.0
        };
        self.values[a] * (e[a + 1] - lo) + self.cum.between(a + 1, b) + b_part
    }

    /// Length of `[lo, hi]` inside the grid support.
    pub fn measure(&self, lo: f64, hi: f64) -> f64 {
        (hi.min(self.grid.hi()) - lo.max(self.grid.lo())).max(0.0)
    }

    pub fn average(&self, lo: f64, hi: f64) -> f64 {
        let m = self.measure(lo, hi);
        if m > 0.0 {
            self.integral(lo, hi) / m
        } else {
            0.0
        }
    }
}

/// `ln Γ(a, x)` for `a > 0`, `x ≥ 0`, without underflow.
pub fn ln_upper_gamma(a: f64, x: f64) -> f64 {
    if x <= a + 1.0 {
        let q = gamma_ur(a, x);
        if q > 1e-280 {
            return q.ln() + ln_gamma(a);
        }
    }
    // Γ(a,x) = e^{-x} x^a · 1/(x+1-a- 1·(1-a)/(x+3-a- ...)), modified Lentz
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    -x + a * x.ln() + h.ln()
}

/// `ln ∫_R^∞ (c log^m r · r^{-s})^p dr`; `-∞` when `c = 0`.
pub fn ln_tail_integral(tail: &TailModel, coeff: f64, extent: f64, p: f64) -> Result<f64> {
    let (m, s) = (tail.log_power, tail.decay);
    if s * p <= 1.0 {
        return Err(LabError::DivergentTail { p, decay: s });
    }
    if coeff == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let kappa = s * p - 1.0;
    if m == 0.0 {
        // c^p R^{1-sp} / (sp-1)
        return Ok(p * coeff.ln() - kappa * extent.ln() - kappa.ln());
    }
    let a = m * p + 1.0;
    let x = kappa * extent.ln().max(0.0);
    Ok(p * coeff.ln() + ln_upper_gamma(a, x) - a * kappa.ln())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(
            "p",
            format!("exponent must be positive and finite, got {p}"),
        ));
    }
    Ok(())
}

/// `ln ∫|f|^p` from grid values, weights and optional tail contributions
/// (already logged). Computed as `p ln m + ln(Σ w (|f|/m)^p + Σ e^{tail - p ln m})`.
fn ln_power_sum(values: &[f64], widths: &[f64], p: f64, ln_tails: &[f64]) -> f64 {
    let m = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let ln_m = if m > 0.0 {
        m.ln()
    } else {
        ln_tails.iter().copied().fold(f64::NEG_INFINITY, f64::max) / p
    };
    if ln_m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let scale = ln_m.exp();
    let mut s: f64 = values
        .iter()
        .zip(widths)
        .map(|(v, w)| {
            let r = v.abs() / scale;
            if r == 0.0 {
                0.0
            } else {
                w * r.powf(p)
            }
        })
        .sum();
    for &t in ln_tails {
        s += (t - p * ln_m).exp();
    }
    p * ln_m + s.ln()
}

fn ln_tails(f: &SampledFunction, p: f64) -> Result<Vec<f64>> {
    let Some(tail) = f.tail() else {
        return Ok(Vec::new());
    };
    let g = f.grid();
    Ok(vec![
        ln_tail_integral(tail, tail.coeff_left, g.lo().abs(), p)?,
        ln_tail_integral(tail, tail.coeff_right, g.hi().abs(), p)?,
    ])
}

/// `ln ∫|f|^p`, grid part plus tails. Stays finite for `p` in the hundreds.
pub fn ln_lp_power(f: &SampledFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let tails = ln_tails(f, p)?;
    Ok(ln_power_sum(f.values(), f.grid().widths(), p, &tails))
}

/// `(∫|f|^p)^{1/p}` over the grid, plus the closed-form tail integral when `f`
/// carries a tail model.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    Ok((ln_lp_power(f, p)? / p).exp())
}

/// `L^p` norm without tails, restricted to cells `range`.
pub fn lp_norm_on(f: &SampledFunction, p: f64, range: std::ops::Range<usize>) -> Result<f64> {
    check_p(p)?;
    let w = &f.grid().widths()[range.clone()];
    Ok((ln_power_sum(&f.values()[range], w, p, &[]) / p).exp())
}

/// `ln ∫∫|F|^p`; tensor-product inputs use their factors (and their tails).
pub fn ln_lp_power_2d(f: &SampledFunction2D, p: f64) -> Result<f64> {
    check_p(p)?;
    if let Some((a, b)) = f.factors() {
        return Ok(ln_lp_power(a, p)? + ln_lp_power(b, p)?);
    }
    let (wx, wy) = (f.grid_x().widths(), f.grid_y().widths());
    let mut weights = Vec::with_capacity(wx.len() * wy.len());
    for &a in wx {
        weights.extend(wy.iter().map(|&b| a * b));
    }
    Ok(ln_power_sum(f.values(), &weights, p, &[]))
}

pub fn lp_norm_2d(f: &SampledFunction2D, p: f64) -> Result<f64> {
    Ok((ln_lp_power_2d(f, p)? / p).exp())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Composite Gauss–Legendre over `panels` equal panels of `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + h * (k as f64 + 0.5);
        let half = 0.5 * h;
        total += x
            .iter()
            .zip(&w)
            .map(|(&xi, &wi)| wi * f(mid + half * xi))
            .sum::<f64>()
            * half;
    }
    total
}
