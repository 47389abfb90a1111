//! Hardy–Littlewood maximal function of piecewise-constant data.
//!
//! At a node `x_i` the supremum over intervals `I ∋ x_i` is attained with both
//! ends in `edges ∪ {x_i}` (the average is monotone in each end inside a cell),
//! and any interval straddling `x_i` averages its two halves. So
//! `Mf(x_i) = max(left_i, right_i)` where `right_i` is the largest slope from
//! `(x_i, F(x_i))` to a prefix point `(e_b, F(e_b))`, `b > i`. Those slopes are
//! maximized on the upper convex hull, found by binary search for the tangent.

use crate::error::{invalid, Result};
use crate::function::SampledFunction;
use crate::grid::Grid;
use crate::par;
use crate::quadrature::Cumulative;

#[inline]
fn slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

/// `max_{b > i} (P[b] - qy[i]) / (xs[b] - qx[i])` for every `i`.
fn right_sided(xs: &[f64], ps: &[f64], qx: &[f64], qy: &[f64]) -> Vec<f64> {
    let n = qx.len();
    let mut out = vec![0.0f64; n];
    // hull vertices, rightmost first; the last entry is the leftmost vertex
    let mut hull: Vec<usize> = Vec::with_capacity(n + 1);
    let pt = |k: usize| (xs[k], ps[k]);
    for i in (0..n).rev() {
        let p = pt(i + 1);
        while hull.len() >= 2 {
            let a = pt(hull[hull.len() - 1]);
            let b = pt(hull[hull.len() - 2]);
            if slope(p, a) <= slope(a, b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i + 1);

        let q = (qx[i], qy[i]);
        let m = hull.len();
        let vertex = |j: usize| pt(hull[m - 1 - j]);
        let (mut lo, mut hi) = (0, m - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if slope(q, vertex(mid)) < slope(q, vertex(mid + 1)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        out[i] = slope(q, vertex(lo));
    }
    out
}

/// Prefix data `(edges, P, x_i, F(x_i))` for `|f|`.
fn prefix_data(grid: &Grid, values: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let cum = Cumulative::abs(grid, values);
    let ps = cum.as_slice().to_vec();
    let qy = (0..values.len())
        .map(|i| ps[i] + values[i].abs() * (grid.nodes()[i] - grid.edges()[i]))
        .collect();
    (grid.edges().to_vec(), ps, qy)
}

/// Exact `M|f|` at the nodes, `O(N log N)`.
pub fn maximal_values(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let (xs, ps, qy) = prefix_data(grid, values);
    let qx = grid.nodes();
    let (right, left) = par::join(
        || right_sided(&xs, &ps, qx, &qy),
        || {
            // reflect x -> -x; integrals from the right become prefix sums
            let rxs: Vec<f64> = xs.iter().rev().map(|x| -x).collect();
            let rps: Vec<f64> = ps.iter().rev().map(|p| -p).collect();
            let rqx: Vec<f64> = qx.iter().rev().map(|x| -x).collect();
            let rqy: Vec<f64> = qy.iter().rev().map(|y| -y).collect();
            let mut l = right_sided(&rxs, &rps, &rqx, &rqy);
            l.reverse();
            l
        },
    );
    (0..n)
        .map(|i| right[i].max(left[i]).max(values[i].abs()))
        .collect()
}

/// `O(N²)` reference: every edge-pair interval and every interval with a node
/// as an end.
pub fn maximal_brute_force(grid: &Grid, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let (xs, ps, qy) = prefix_data(grid, values);
    let qx = grid.nodes();
    let chunk = 64;
    let chunks = n.div_ceil(chunk);
    let pairs = par::max_reduce(n, chunks, |c| {
        let mut out = vec![0.0f64; n];
        for a in c * chunk..((c + 1) * chunk).min(n) {
            // intervals [e_a, e_b] cover nodes a..b-1; sweep b downwards
            let mut best = 0.0f64;
            for b in (a + 1..=n).rev() {
                best = best.max((ps[b] - ps[a]) / (xs[b] - xs[a]));
                out[b - 1] = out[b - 1].max(best);
            }
        }
        out
    });
    let ends = par::map_range(n, |i| {
        let q = (qx[i], qy[i]);
        let r = (i + 1..=n)
            .map(|b| slope(q, (xs[b], ps[b])))
            .fold(0.0, f64::max);
        let l = (0..=i)
            .map(|a| slope((xs[a], ps[a]), q))
            .fold(0.0, f64::max);
        r.max(l)
    });
    (0..n)
        .map(|i| pairs[i].max(ends[i]).max(values[i].abs()))
        .collect()
}

/// Tail shape `(m, s)` of `Mf` given what is known about `f` beyond the grid.
pub(crate) fn maximal_tail(f: &SampledFunction) -> Option<(f64, f64)> {
    match f.tail() {
        None if f.is_compactly_supported() => Some((0.0, 1.0)),
        None => None,
        Some(t) if t.decay > 1.0 => Some((0.0, 1.0)),
        Some(t) if t.decay == 1.0 => Some((t.log_power + 1.0, 1.0)),
        Some(t) => Some((t.log_power, t.decay)),
    }
}

pub(crate) fn attach_tail(out: SampledFunction, tail: Option<(f64, f64)>) -> SampledFunction {
    match tail {
        Some((m, s)) => {
            let fallback = out.clone();
            out.with_fitted_tail(m, s).unwrap_or(fallback)
        }
        None => out,
    }
}

/// `Mf` at the nodes. Compactly supported input gets a `c/|x|` tail.
pub fn hl_maximal(f: &SampledFunction) -> SampledFunction {
    let values = maximal_values(f.grid(), f.values());
    let out = SampledFunction::new(f.grid().clone(), values).expect("maximal values are finite");
    attach_tail(out, maximal_tail(f))
}

/// `M^k f`; compactly supported input ends with a `log^{k-1}|x|/|x|` tail.
pub fn iterated_maximal(f: &SampledFunction, k: u32) -> Result<SampledFunction> {
    if k < 1 {
        return Err(invalid("k", "iteration count must be at least 1"));
    }
    let mut g = hl_maximal(f);
    for _ in 1..k {
        g = hl_maximal(&g);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::build(&GridSpec::hybrid(2.0, 64.0, 64, 1.2)).unwrap())
    }

    #[test]
    fn indicator_values() {
        let g = grid();
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let m = hl_maximal(&f);
        for (x, v) in g.nodes().iter().zip(m.values()) {
            if (0.0..=1.0).contains(x) {
                assert_relative_eq!(*v, 1.0, max_relative = 1e-14);
            } else if *x > 1.0 {
                assert_relative_eq!(*v, 1.0 / x, max_relative = 1e-14);
            } else {
                assert_relative_eq!(*v, 1.0 / (1.0 - x), max_relative = 1e-14);
            }
        }
        assert!(m.tail().is_some());
    }

    #[test]
    fn quarter_at_four() {
        let g =
            Arc::new(Grid::from_edges((0..=8).map(|k| k as f64 * 0.5 - 0.0).collect()).unwrap());
        // node 3.75 is the midpoint of [3.5, 4]; check the interval [0, x]
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let m = hl_maximal(&f);
        assert_relative_eq!(m.values()[7], 1.0 / 3.75, max_relative = 1e-15);
    }

    #[test]
    fn matches_brute_force_on_random_data() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = grid();
        let v: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..3.0)).collect();
        let fast = maximal_values(&g, &v);
        let slow = maximal_brute_force(&g, &v);
        for (a, b) in fast.iter().zip(&slow) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn iterated_is_monotone() {
        let f = SampledFunction::indicator(grid(), 0.0, 1.0);
        let m1 = iterated_maximal(&f, 1).unwrap();
        assert_eq!(m1, hl_maximal(&f));
        let m2 = iterated_maximal(&f, 2).unwrap();
        assert!(m2.values().iter().zip(m1.values()).all(|(a, b)| a >= b));
        assert_eq!(m2.tail().unwrap().log_power, 1.0);
        assert!(iterated_maximal(&f, 0).is_err());
    }
}
