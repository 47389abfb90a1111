//! Dyadic square function `S_d f = (Σ_Q (f_Q - f_Q̂)^2 χ_Q)^{1/2}`.

use crate::dyadic::DyadicFamily;
use crate::error::{LabError, Result};
use crate::function::SampledFunction;
use crate::par;
use crate::quadrature::Primitive;

/// `S_d f` over the non-root cubes of the first tree of `family`.
///
/// Each node only meets one cube per generation, so the sum runs down the
/// chain of cubes containing it; once a cube fits inside a single grid cell
/// all deeper differences vanish and the chain stops. Depths of several
/// hundred generations are therefore cheap.
pub fn dyadic_square(f: &SampledFunction, family: &DyadicFamily) -> Result<SampledFunction> {
    let grid = f.grid();
    let (lo, hi) = family.root(0);
    for (&x, &v) in grid.nodes().iter().zip(f.values()) {
        if v != 0.0 && !(x >= lo && x < hi) {
            return Err(LabError::OutsideSupport { lo, hi });
        }
    }
    let prim = Primitive::new(grid, f.values());
    let nodes = grid.nodes();
    let values = par::map_range(nodes.len(), |i| {
        let x = nodes[i];
        if !(x >= lo && x < hi) {
            return 0.0;
        }
        let mut prev = prim.integral(lo, hi) / (hi - lo);
        let mut s2 = 0.0;
        for level in 1..=family.depth() {
            let (a, b) = family.containing(0, level, x).expect("node inside root");
            let (ca, cb) = (grid.locate(a), grid.locate(b));
            let inside_cell = match (ca, cb) {
                (Some(p), Some(q)) => p == q || (q == p + 1 && grid.edges()[q] == b),
                _ => false,
            };
            if inside_cell {
                let v = f.values()[ca.unwrap()];
                s2 += (v - prev) * (v - prev);
                break;
            }
            let avg = prim.integral(a, b) / (b - a);
            s2 += (avg - prev) * (avg - prev);
            prev = avg;
        }
        s2.sqrt()
    });
    SampledFunction::new(grid.clone(), values)
}
