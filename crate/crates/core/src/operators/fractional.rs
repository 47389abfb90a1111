//! Fractional maximal function `M_α` and Riesz potential `I_α` in one dimension.

use crate::error::{invalid, Result};
use crate::function::SampledFunction;
use crate::par;
use crate::quadrature::Cumulative;

use super::maximal::attach_tail;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("need 0 < α < 1, got {alpha}")));
    }
    Ok(())
}

/// `M_α f(x) = sup_{I ∋ x} |I|^{α-1} ∫_I |f|`.
///
/// Moving one end of `I` inside a cell, the objective has at most one
/// critical point and it is a minimum, so ends in `edges ∪ {x}` suffice.
/// The scan is `O(N²)`.
pub fn frac_maximal(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    let grid = f.grid();
    let n = f.len();
    let cum = Cumulative::abs(grid, f.values());
    let (e, x) = (grid.edges(), grid.nodes());
    let p = cum.as_slice();
    let a1 = alpha - 1.0;
    let fx: Vec<f64> = (0..n)
        .map(|i| p[i] + f.values()[i].abs() * (x[i] - e[i]))
        .collect();
    let chunk = 64;
    let pairs = par::max_reduce(n, n.div_ceil(chunk), |c| {
        let mut out = vec![0.0f64; n];
        for a in c * chunk..((c + 1) * chunk).min(n) {
            let mut best = 0.0f64;
            for b in (a + 1..=n).rev() {
                best = best.max((p[b] - p[a]) * (e[b] - e[a]).powf(a1));
                out[b - 1] = out[b - 1].max(best);
            }
        }
        out
    });
    let values = par::map_range(n, |i| {
        let r = (i + 1..=n)
            .map(|b| (p[b] - fx[i]) * (e[b] - x[i]).powf(a1))
            .fold(0.0, f64::max);
        let l = (0..=i)
            .map(|a| (fx[i] - p[a]) * (x[i] - e[a]).powf(a1))
            .fold(0.0, f64::max);
        pairs[i].max(r).max(l)
    });
    let out = SampledFunction::new(grid.clone(), values)?;
    let tail = f.is_compactly_supported().then_some((0.0, 1.0 - alpha));
    Ok(attach_tail(out, tail))
}

/// `∫_cell |x - y|^{α-1} dy` for the cell `[lo, hi]`.
#[inline]
fn cell_kernel(x: f64, lo: f64, hi: f64, alpha: f64) -> f64 {
    if x <= lo || x >= hi {
        // d^α (1 - (1 - w/d)^α) / α with d the far distance
        let (near, far) = if x <= lo {
            (lo - x, hi - x)
        } else {
            (x - hi, x - lo)
        };
        let w = far - near;
        -far.powf(alpha) * (alpha * (-w / far).ln_1p()).exp_m1() / alpha
    } else {
        ((x - lo).powf(alpha) + (hi - x).powf(alpha)) / alpha
    }
}

/// `I_α f(x) = ∫ f(y) |x - y|^{α-1} dy` at an arbitrary point, exact for the
/// piecewise-constant `f`.
pub fn frac_integral_at(f: &SampledFunction, alpha: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let e = f.grid().edges();
    Ok(f.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, v)| v * cell_kernel(x, e[j], e[j + 1], alpha))
        .sum())
}

/// `I_α f` at the nodes, with the singular cell integrated exactly.
pub fn frac_integral(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_alpha(alpha)?;
    let grid = f.grid();
    let (e, x, v) = (grid.edges(), grid.nodes(), f.values());
    let values = par::map_range(x.len(), |i| {
        v.iter()
            .enumerate()
            .filter(|(_, vj)| **vj != 0.0)
            .map(|(j, vj)| vj * cell_kernel(x[i], e[j], e[j + 1], alpha))
            .sum()
    });
    let out = SampledFunction::new(grid.clone(), values)?;
    let tail = f.is_compactly_supported().then_some((0.0, 1.0 - alpha));
    Ok(attach_tail(out, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    #[test]
    fn half_maximal_at_four() {
        let g = Arc::new(Grid::from_edges(vec![-1.0, 0.0, 0.5, 1.0, 2.0, 3.5, 4.5, 6.0]).unwrap());
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let m = frac_maximal(&f, 0.5).unwrap();
        let i = g.locate(4.0).unwrap();
        assert_eq!(g.nodes()[i], 4.0);
        assert_relative_eq!(m.values()[i], 0.5, max_relative = 1e-14);
    }

    #[test]
    fn riesz_potential_at_origin() {
        let g = Arc::new(Grid::build(&GridSpec::hybrid(2.0, 16.0, 64, 1.1)).unwrap());
        let f = SampledFunction::indicator(g, 0.0, 1.0);
        assert_relative_eq!(
            frac_integral_at(&f, 0.5, 0.0).unwrap(),
            2.0,
            max_relative = 1e-12
        );
        assert!(frac_integral_at(&f, 1.0, 0.0).is_err());
    }

    #[test]
    fn maximal_below_potential() {
        let g = Arc::new(Grid::build(&GridSpec::hybrid(2.0, 64.0, 48, 1.2)).unwrap());
        let f = SampledFunction::from_fn(g, |x| (-x * x).exp()).unwrap();
        for alpha in [0.25, 0.5, 0.75] {
            let m = frac_maximal(&f, alpha).unwrap();
            let i = frac_integral(&f, alpha).unwrap();
            for (a, b) in m.values().iter().zip(i.values()) {
                assert!(*a <= b * (1.0 + 1e-12));
            }
        }
    }
}
