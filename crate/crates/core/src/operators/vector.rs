//! Vector-valued maximal function `M̄_q f = (Σ_j (M f_j)^q)^{1/q}`.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::function::SampledFunction;
use crate::grid::Grid;
use crate::par;

use super::maximal::maximal_values;

#[derive(Debug, Clone)]
pub struct VectorSampledFunction {
    components: Vec<SampledFunction>,
    q: f64,
}

impl VectorSampledFunction {
    pub fn new(components: Vec<SampledFunction>, q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(invalid("q", format!("need 1 < q < ∞, got {q}")));
        }
        let Some(first) = components.first() else {
            return Err(invalid("components", "need at least one component"));
        };
        let g = first.grid();
        if components
            .iter()
            .any(|c| !Arc::ptr_eq(c.grid(), g) && c.grid() != g)
        {
            return Err(invalid("components", "components must share one grid"));
        }
        Ok(VectorSampledFunction { components, q })
    }

    pub fn components(&self) -> &[SampledFunction] {
        &self.components
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    /// `f̄_q = (Σ |f_j|^q)^{1/q}` at every node.
    pub fn aggregate(&self) -> SampledFunction {
        let rows: Vec<&[f64]> = self.components.iter().map(|c| c.values()).collect();
        let values = lq_aggregate(&rows, self.q);
        SampledFunction::new(self.grid().clone(), values).expect("finite aggregate")
    }
}

/// Scaled `ℓ^q` sum down the columns of `rows`.
fn lq_aggregate(rows: &[&[f64]], q: f64) -> Vec<f64> {
    let n = rows[0].len();
    (0..n)
        .map(|i| {
            let m = rows.iter().fold(0.0f64, |a, r| a.max(r[i].abs()));
            if m == 0.0 {
                return 0.0;
            }
            let s: f64 = rows.iter().map(|r| (r[i].abs() / m).powf(q)).sum();
            m * s.powf(1.0 / q)
        })
        .collect()
}

/// `ℓ^q` aggregate of the componentwise maximal functions.
pub fn vv_maximal(fs: &VectorSampledFunction) -> SampledFunction {
    let grid = fs.grid();
    let maxed = par::map_slice(fs.components(), |c| maximal_values(grid, c.values()));
    let rows: Vec<&[f64]> = maxed.iter().map(|v| v.as_slice()).collect();
    SampledFunction::new(grid.clone(), lq_aggregate(&rows, fs.q())).expect("finite aggregate")
}
