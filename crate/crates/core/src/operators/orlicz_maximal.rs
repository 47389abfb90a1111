//! Orlicz maximal function `M_Φ f(x) = sup_{Q ∋ x} ‖f‖_{Φ,Q}`.

use crate::error::Result;
use crate::function::SampledFunction;
use crate::orlicz::{luxemburg_norm, OrliczGauge};
use crate::par;

use super::basis::{basis_maximal, Basis};
use super::maximal::{attach_tail, hl_maximal};

/// Distinct levels above which interval scans fall back to cell-by-cell sums.
const LEVEL_COMPRESSION_LIMIT: usize = 32;

fn distinct_levels(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values
        .iter()
        .map(|x| x.abs())
        .filter(|&x| x > 0.0)
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `M_{Φ_λ} f` over `basis`.
///
/// For the interval basis two shortcuts are exact: `λ = 0` is the
/// Hardy–Littlewood maximal function, and `f = cχ_E` gives
/// `‖cχ_E‖_{Φ,Q} = c/Φ^{-1}(|Q|/|E ∩ Q|)`, a decreasing function of the
/// density `|E ∩ Q|/|Q|`, so `M_Φ f = c/Φ^{-1}(c/Mf)`. Other inputs are
/// scanned over one-sided intervals ending at `x` (the norm of a union is at
/// most the larger of the two norms), which is `O(N²)` Luxemburg solves.
pub fn orlicz_maximal(
    f: &SampledFunction,
    gauge: &OrliczGauge,
    basis: &Basis,
) -> Result<SampledFunction> {
    let grid = f.grid();
    let tail = f.is_compactly_supported().then_some((gauge.lambda(), 1.0));
    match basis {
        Basis::Intervals if gauge.lambda() == 0.0 => Ok(hl_maximal(f)),
        Basis::Intervals => {
            let levels = distinct_levels(f.values());
            if levels.len() == 1 {
                let c = levels[0];
                let m = hl_maximal(f);
                let values = m
                    .values()
                    .iter()
                    .map(|&mv| {
                        if mv > 0.0 {
                            c * gauge.indicator_norm((mv / c).min(1.0))
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let out = SampledFunction::new(grid.clone(), values)?;
                return Ok(attach_tail(out, tail));
            }
            let out = SampledFunction::new(grid.clone(), one_sided_scan(f, gauge, &levels))?;
            Ok(attach_tail(out, tail))
        }
        Basis::Rectangles2D => basis_maximal(f, basis),
        _ if gauge.lambda() == 0.0 => basis_maximal(f, basis),
        _ => {
            let sets = basis.enumerate(grid)?;
            let norms: Vec<f64> = par::map_slice(&sets, |&(lo, hi)| {
                luxemburg_norm(f, gauge, lo, hi).unwrap_or(0.0)
            });
            let nodes = grid.nodes();
            let anchored = matches!(basis, Basis::OriginAnchored);
            let values = par::map_range(nodes.len(), |i| {
                let x = nodes[i];
                sets.iter()
                    .zip(&norms)
                    .filter(|(&(lo, hi), _)| {
                        if anchored {
                            lo < x && x <= hi
                        } else {
                            lo <= x && x <= hi
                        }
                    })
                    .map(|(_, &n)| n)
                    .fold(0.0, f64::max)
            });
            SampledFunction::new(grid.clone(), values)
        }
    }
}

fn one_sided_scan(f: &SampledFunction, gauge: &OrliczGauge, levels: &[f64]) -> Vec<f64> {
    let grid = f.grid();
    let (e, x, v) = (grid.edges(), grid.nodes(), f.values());
    let n = v.len();
    let compress = levels.len() <= LEVEL_COMPRESSION_LIMIT;
    // per-level prefix measures, anchored like every other prefix sum
    let level_of: Vec<Option<usize>> = v
        .iter()
        .map(|y| {
            let a = y.abs();
            (a > 0.0).then(|| levels.partition_point(|&l| l < a))
        })
        .collect();
    let prefix: Vec<Vec<f64>> = if compress {
        (0..levels.len())
            .map(|l| {
                let mut p = vec![0.0; n + 1];
                for k in 0..n {
                    p[k + 1] = p[k]
                        + if level_of[k] == Some(l) {
                            e[k + 1] - e[k]
                        } else {
                            0.0
                        };
                }
                p
            })
            .collect()
    } else {
        Vec::new()
    };
    // measure of each level on [e_a, x_i] (a ≤ i) or [x_i, e_b] (b > i)
    let norm_between = |i: usize, end: usize, right: bool| -> f64 {
        let half = x[i] - e[i];
        let li = level_of[i];
        let (total, pieces): (f64, Vec<(f64, f64)>) = if compress {
            let mut pieces = Vec::with_capacity(levels.len());
            for (l, p) in prefix.iter().enumerate() {
                let mut mu = if right {
                    p[end] - p[i + 1]
                } else {
                    p[i] - p[end]
                };
                if li == Some(l) {
                    mu += if right { e[i + 1] - x[i] } else { half };
                }
                if mu > 0.0 {
                    pieces.push((levels[l], mu));
                }
            }
            let total = if right { e[end] - x[i] } else { x[i] - e[end] };
            (total, pieces)
        } else {
            let cells: Box<dyn Iterator<Item = usize>> = if right {
                Box::new(i + 1..end)
            } else {
                Box::new(end..i)
            };
            let mut pieces: Vec<(f64, f64)> =
                cells.map(|k| (v[k].abs(), e[k + 1] - e[k])).collect();
            pieces.push((v[i].abs(), if right { e[i + 1] - x[i] } else { half }));
            let total = if right { e[end] - x[i] } else { x[i] - e[end] };
            (total, pieces)
        };
        gauge.luxemburg_levels(&pieces, total)
    };
    par::map_range(n, |i| {
        let r = (i + 1..=n)
            .map(|b| norm_between(i, b, true))
            .fold(0.0, f64::max);
        let l = (0..=i)
            .map(|a| norm_between(i, a, false))
            .fold(0.0, f64::max);
        r.max(l)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    #[test]
    fn lambda_zero_is_hl() {
        let g = Arc::new(Grid::build(&GridSpec::hybrid(1.0, 8.0, 16, 1.3)).unwrap());
        let f = SampledFunction::from_fn(g, |x| (x * 2.0).sin()).unwrap();
        let g0 = OrliczGauge::new(0.0).unwrap();
        assert_eq!(
            orlicz_maximal(&f, &g0, &Basis::Intervals).unwrap(),
            hl_maximal(&f)
        );
    }

    #[test]
    fn indicator_shortcut_matches_scan() {
        let g = Arc::new(Grid::build(&GridSpec::hybrid(2.0, 32.0, 32, 1.25)).unwrap());
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0).scale(2.0);
        let gauge = OrliczGauge::new(1.0).unwrap();
        let fast = orlicz_maximal(&f, &gauge, &Basis::Intervals).unwrap();
        let levels = distinct_levels(f.values());
        let slow = one_sided_scan(&f, &gauge, &levels);
        for (a, b) in fast.values().iter().zip(&slow) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn monotone_in_lambda() {
        let g = Arc::new(Grid::build(&GridSpec::hybrid(1.0, 8.0, 16, 1.3)).unwrap());
        let f = SampledFunction::from_fn(g, |x| 1.0 + x.cos()).unwrap();
        let mut prev: Option<SampledFunction> = None;
        for lambda in [0.0, 0.5, 1.0, 2.0] {
            let m =
                orlicz_maximal(&f, &OrliczGauge::new(lambda).unwrap(), &Basis::Intervals).unwrap();
            if let Some(p) = &prev {
                assert!(m
                    .values()
                    .iter()
                    .zip(p.values())
                    .all(|(a, b)| *a >= b * (1.0 - 1e-9)));
            }
            prev = Some(m);
        }
    }
}
