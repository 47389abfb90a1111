//! Hilbert transform and its iterated commutators with `b(x) = log|x|`.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::function::SampledFunction;
use crate::par;

use super::maximal::attach_tail;

/// Tail of `Hf` for compactly supported `f`: `c/|x|`, or `c/|x|^2` when the
/// mean vanishes.
fn hilbert_tail(f: &SampledFunction) -> Option<(f64, f64)> {
    if !f.is_compactly_supported() {
        return None;
    }
    let mass = f.integral();
    let scale: f64 = f
        .values()
        .iter()
        .zip(f.grid().widths())
        .map(|(v, w)| (v * w).abs())
        .sum();
    if mass.abs() > 1e-12 * scale {
        Some((0.0, 1.0))
    } else {
        Some((0.0, 2.0))
    }
}

/// `Hf(x_i) = (1/π) Σ_j f_j log|(x_i - e_j)/(x_i - e_{j+1})|`: the exact
/// principal value of the piecewise-constant `f` at each node. The own cell
/// contributes nothing because `x_i` is its midpoint.
pub fn hilbert(f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let (e, x, v) = (grid.edges(), grid.nodes(), f.values());
    let values = par::map_range(x.len(), |i| {
        let xi = x[i];
        let mut s = 0.0;
        for j in 0..v.len() {
            if j != i && v[j] != 0.0 {
                let w = e[j + 1] - e[j];
                s += v[j] * (w / (xi - e[j + 1])).ln_1p();
            }
        }
        s / PI
    });
    let out = SampledFunction::new(grid.clone(), values).expect("finite Hilbert values");
    attach_tail(out, hilbert_tail(f))
}

/// Plain midpoint rule `(1/π) Σ_{j≠i} f_j w_j / (x_i - x_j)`.
pub fn hilbert_midpoint(f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let (x, w, v) = (grid.nodes(), grid.widths(), f.values());
    let values = par::map_range(x.len(), |i| {
        let mut s = 0.0;
        for j in 0..v.len() {
            if j != i {
                s += v[j] * w[j] / (x[i] - x[j]);
            }
        }
        s / PI
    });
    let out = SampledFunction::new(grid.clone(), values).expect("finite Hilbert values");
    attach_tail(out, hilbert_tail(f))
}

#[inline]
fn symbol(x: f64) -> f64 {
    x.abs().ln()
}

/// `H_b^k f = [b, H_b^{k-1}] f` with `b = log|x|`, evaluated through its kernel
/// `(1/π)(b(x) - b(y))^k / (x - y)`, which is bounded on the diagonal. The
/// diagonal cell contributes `f_i w_i b'(x_i)/π` when `k = 1` and nothing for
/// `k ≥ 2`.
///
/// Compactly supported input gets a `log^k|x|/|x|` tail.
pub fn commutator_k(f: &SampledFunction, k: u32) -> Result<SampledFunction> {
    commutator_kernel(f, k, true)
}

fn commutator_kernel(f: &SampledFunction, k: u32, diagonal: bool) -> Result<SampledFunction> {
    if k < 1 {
        return Err(invalid("k", "commutator order must be at least 1"));
    }
    let grid = f.grid();
    let (x, w, v) = (grid.nodes(), grid.widths(), f.values());
    if x.contains(&0.0) {
        return Err(invalid("grid", "a node sits at the singularity of log|x|"));
    }
    let b: Vec<f64> = x.iter().map(|&xi| symbol(xi)).collect();
    let values = par::map_range(x.len(), |i| {
        let mut s = 0.0;
        for j in 0..v.len() {
            if j != i && v[j] != 0.0 {
                s += (b[i] - b[j]).powi(k as i32) * v[j] * w[j] / (x[i] - x[j]);
            }
        }
        if diagonal && k == 1 {
            s += v[i] * w[i] / x[i];
        }
        s / PI
    });
    let out = SampledFunction::new(grid.clone(), values)?;
    let tail = f.is_compactly_supported().then_some((k as f64, 1.0));
    Ok(attach_tail(out, tail))
}

/// The defining recursion `b·H_b^{k-1}f - H_b^{k-1}(b f)` with the midpoint
/// Hilbert transform; agrees with the kernel form without the diagonal term.
pub fn commutator_recursive(f: &SampledFunction, k: u32) -> Result<SampledFunction> {
    if k < 1 {
        return Err(invalid("k", "commutator order must be at least 1"));
    }
    fn go(f: &SampledFunction, k: u32) -> Result<SampledFunction> {
        if k == 0 {
            return Ok(hilbert_midpoint(f).without_tail());
        }
        let bf = f.map_with_x(|x, v| symbol(x) * v)?;
        let a = go(f, k - 1)?.map_with_x(|x, v| symbol(x) * v)?;
        let c = go(&bf, k - 1)?;
        a.zip_with(&c, |p, q| p - q)
    }
    go(f, k)
}

#[cfg(test)]
pub(crate) fn commutator_kernel_offdiagonal(
    f: &SampledFunction,
    k: u32,
) -> Result<SampledFunction> {
    commutator_kernel(f, k, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::build(&GridSpec::hybrid(2.0, 4096.0, 512, 1.05)).unwrap())
    }

    #[test]
    fn indicator_closed_form() {
        let g = grid();
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let h = hilbert(&f);
        for (x, v) in g.nodes().iter().zip(h.values()) {
            let exact = (x / (x - 1.0)).abs().ln() / PI;
            assert!((v - exact).abs() < 1e-12 * (1.0 + exact.abs()));
        }
        let hm = hilbert_midpoint(&f);
        let i = g.locate(2.0).unwrap();
        assert!((hm.values()[i] - 2f64.ln() / PI).abs() < 1e-2);
    }

    #[test]
    fn even_input_gives_odd_output() {
        let g = grid();
        let f = SampledFunction::indicator(g, -1.0, 1.0);
        let h = hilbert(&f);
        let v = h.values();
        let n = v.len();
        for i in 0..n {
            assert!((v[i] + v[n - 1 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn commutator_forms_agree() {
        let g = grid();
        let f = SampledFunction::indicator(g, 0.0, 1.0);
        for k in 1..=2 {
            let a = commutator_kernel_offdiagonal(&f, k).unwrap();
            let b = commutator_recursive(&f, k).unwrap();
            let scale = a.max_abs();
            for (p, q) in a.values().iter().zip(b.values()) {
                assert!((p - q).abs() < 1e-9 * scale, "{p} vs {q}");
            }
        }
        assert!(commutator_k(&f, 0).is_err());
    }

    #[test]
    fn commutator_far_field() {
        // [b, H]χ_(0,1)(x) = (log x + 1)/(πx) + O(log x / x²); the ratio
        // against log x alone is still 1 + 1/log x ≈ 1.10 at 2^14
        let g = Arc::new(Grid::build(&GridSpec::hybrid(2.0, 65536.0, 1024, 1.02)).unwrap());
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let c = commutator_k(&f, 1).unwrap();
        let i = g.locate(16384.0).unwrap();
        let x = g.nodes()[i];
        assert_relative_eq!(
            c.values()[i] * PI * x / (x.ln() + 1.0),
            1.0,
            max_relative = 1e-3
        );
        let ratio = c.values()[i] * PI * x / x.ln();
        assert!(ratio > 1.0 && ratio < 1.0 + 1.05 / x.ln());
        assert_eq!(c.tail().unwrap().log_power, 1.0);
    }
}
