//! Strong maximal function over axis-parallel rectangles.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::function::{SampledFunction, SampledFunction2D};
use crate::grid::Grid;
use crate::par;

use super::maximal::{hl_maximal, maximal_values};

/// Largest grid side for which the rectangle family is scanned exhaustively.
pub const BRUTE_FORCE_MAX_SIDE: usize = 96;

#[derive(Debug, Clone)]
pub struct StrongMaximal {
    /// Max over the rectangle family (tensor of the per-axis interval families).
    pub certified: SampledFunction2D,
    /// `M_y M_x |F|`, a pointwise upper bound for `certified`.
    pub iterated: SampledFunction2D,
}

/// Apply the 1-D maximal function along x (rows of fixed `iy`), then along y.
pub fn iterated_strong(f: &SampledFunction2D) -> SampledFunction2D {
    let (nx, ny) = f.shape();
    let (gx, gy) = (f.grid_x().clone(), f.grid_y().clone());
    let v = f.values();
    // along x for every iy
    let cols: Vec<Vec<f64>> = par::map_range(ny, |iy| {
        let line: Vec<f64> = (0..nx).map(|ix| v[ix * ny + iy]).collect();
        maximal_values(&gx, &line)
    });
    // along y for every ix
    let rows: Vec<Vec<f64>> = par::map_range(nx, |ix| {
        let line: Vec<f64> = (0..ny).map(|iy| cols[iy][ix]).collect();
        maximal_values(&gy, &line)
    });
    let values = rows.into_iter().flatten().collect();
    SampledFunction2D::new(gx, gy, values).expect("finite maximal values")
}

/// Interval ends used for the x-scan: edges and nodes merged in order.
fn breakpoints(g: &Grid) -> Vec<f64> {
    let mut pts = Vec::with_capacity(2 * g.len() + 1);
    for (i, &e) in g.edges().iter().enumerate() {
        pts.push(e);
        if i < g.len() {
            pts.push(g.nodes()[i]);
        }
    }
    pts
}

fn certified_brute_force(f: &SampledFunction2D) -> SampledFunction2D {
    let (nx, ny) = f.shape();
    let (gx, gy) = (f.grid_x(), f.grid_y());
    let v = f.values();
    let pts = breakpoints(gx);
    let m = pts.len();
    let ex = gx.edges();
    // overlap of cell ix with [a, b]
    let overlap = |ix: usize, a: f64, b: f64| (ex[ix + 1].min(b) - ex[ix].max(a)).max(0.0);
    let best = par::max_reduce(nx * ny, m, |ia| {
        let mut out = vec![0.0; nx * ny];
        let a = pts[ia];
        for &b in &pts[ia + 1..] {
            // column averages over x ∈ [a, b], then the exact 1-D maximal in y
            let cells: Vec<usize> = (0..nx).filter(|&ix| overlap(ix, a, b) > 0.0).collect();
            let len = b - a;
            let g: Vec<f64> = (0..ny)
                .map(|iy| {
                    cells
                        .iter()
                        .map(|&ix| overlap(ix, a, b) * v[ix * ny + iy].abs())
                        .sum::<f64>()
                        / len
                })
                .collect();
            let mg = maximal_values(gy, &g);
            for ix in 0..nx {
                let x = gx.nodes()[ix];
                if x >= a && x <= b {
                    for (o, &m) in out[ix * ny..(ix + 1) * ny].iter_mut().zip(&mg) {
                        if m > *o {
                            *o = m;
                        }
                    }
                }
            }
        }
        out
    });
    SampledFunction2D::new(gx.clone(), gy.clone(), best).expect("finite maximal values")
}

/// `M_R F`. Tensor inputs `f ⊗ g` factor exactly as `Mf ⊗ Mg` (with tails);
/// other inputs are scanned exhaustively, which is limited to small grids.
pub fn strong_maximal_2d(f: &SampledFunction2D) -> Result<StrongMaximal> {
    let iterated = iterated_strong(f);
    if let Some((a, b)) = f.factors() {
        let certified = SampledFunction2D::tensor(&hl_maximal(&a.abs()), &hl_maximal(&b.abs()));
        let iterated = iterated.with_factors(certified.factors().cloned().unwrap());
        return Ok(StrongMaximal {
            certified,
            iterated,
        });
    }
    let (nx, ny) = f.shape();
    if nx.max(ny) > BRUTE_FORCE_MAX_SIDE {
        return Err(invalid(
            "grid",
            format!("{nx}x{ny} exceeds the {BRUTE_FORCE_MAX_SIDE}x{BRUTE_FORCE_MAX_SIDE} exhaustive scan"),
        ));
    }
    Ok(StrongMaximal {
        certified: certified_brute_force(f),
        iterated,
    })
}

/// Tensor indicator `χ_[lo,hi] ⊗ χ_[lo,hi]` on `grid × grid`.
pub fn tensor_indicator(grid: Arc<Grid>, lo: f64, hi: f64) -> SampledFunction2D {
    let f = SampledFunction::indicator(grid, lo, hi);
    SampledFunction2D::tensor(&f, &f)
}
