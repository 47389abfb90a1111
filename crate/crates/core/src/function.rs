use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::grid::Grid;

/// Power-log decay model `|f(x)| ≈ c · log^m|x| · |x|^{-s}` beyond the grid.
///
/// The coefficient is kept separately for the two sides since the operators
/// here are rarely symmetric about the origin (`Mχ_[0,1]` is `1/x` on the right
/// and `1/(1-x)` on the left).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub log_power: f64,
    pub decay: f64,
    pub coeff_left: f64,
    pub coeff_right: f64,
}

/// Relative mismatch allowed between a tail model and the outermost samples.
pub const TAIL_MATCH_TOLERANCE: f64 = 0.10;

impl TailModel {
    /// Shape `log^m|x| |x|^{-s}` without the coefficient.
    pub fn shape(&self, x: f64) -> f64 {
        let r = x.abs();
        let base = r.powf(-self.decay);
        if self.log_power == 0.0 {
            base
        } else {
            r.ln().max(0.0).powf(self.log_power) * base
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let c = if x < 0.0 {
            self.coeff_left
        } else {
            self.coeff_right
        };
        c * self.shape(x)
    }

    /// Fit both coefficients so the model reproduces `|values|` at the two
    /// outermost nodes.
    pub fn fit(grid: &Grid, values: &[f64], log_power: f64, decay: f64) -> Result<TailModel> {
        if !(decay > 0.0) {
            return Err(invalid(
                "decay",
                format!("tail decay must be positive, got {decay}"),
            ));
        }
        if log_power < 0.0 {
            return Err(invalid("log_power", "tail log power must be nonnegative"));
        }
        let mut model = TailModel {
            log_power,
            decay,
            coeff_left: 0.0,
            coeff_right: 0.0,
        };
        let nodes = grid.nodes();
        let n = nodes.len();
        let coeff = |x: f64, v: f64| {
            let s = model.shape(x);
            if s > 0.0 && s.is_finite() {
                v.abs() / s
            } else {
                0.0
            }
        };
        let (left, right) = (
            coeff(nodes[0], values[0]),
            coeff(nodes[n - 1], values[n - 1]),
        );
        model.coeff_left = left;
        model.coeff_right = right;
        Ok(model)
    }
}

/// Real function sampled at the midpoints of a 1-D grid, piecewise constant on
/// cells, with an optional tail model for `|x|` beyond the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    tail: Option<TailModel>,
}

impl SampledFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("expected {} values, got {}", grid.len(), values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "values must be finite"));
        }
        Ok(SampledFunction {
            grid,
            values,
            tail: None,
        })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        SampledFunction {
            grid,
            values: vec![0.0; n],
            tail: None,
        }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    /// Cell averages of `χ_[lo, hi]`; exact 0/1 when `lo`, `hi` are edges.
    pub fn indicator(grid: Arc<Grid>, lo: f64, hi: f64) -> Self {
        let values = grid
            .edges()
            .windows(2)
            .map(|w| {
                let overlap = (w[1].min(hi) - w[0].max(lo)).max(0.0);
                if overlap >= w[1] - w[0] {
                    1.0
                } else {
                    overlap / (w[1] - w[0])
                }
            })
            .collect();
        SampledFunction {
            grid,
            values,
            tail: None,
        }
    }

    /// Attach a tail model after checking it against the outermost samples.
    pub fn with_tail(mut self, tail: TailModel) -> Result<Self> {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        for &i in &[0, n - 1] {
            let sampled = self.values[i].abs();
            let model = tail.eval(nodes[i]);
            let scale = sampled.max(model);
            if scale > 0.0 && (sampled - model).abs() > TAIL_MATCH_TOLERANCE * scale {
                return Err(invalid(
                    "tail_model",
                    format!(
                        "model {model:.6e} disagrees with sample {sampled:.6e} at x = {}",
                        nodes[i]
                    ),
                ));
            }
        }
        self.tail = Some(tail);
        Ok(self)
    }

    /// Attach a tail of the given shape with coefficients fitted at the
    /// outermost nodes.
    pub fn with_fitted_tail(mut self, log_power: f64, decay: f64) -> Result<Self> {
        self.tail = Some(TailModel::fit(&self.grid, &self.values, log_power, decay)?);
        Ok(self)
    }

    pub fn without_tail(mut self) -> Self {
        self.tail = None;
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True if nothing is known about `f` beyond the grid and the outermost
    /// cells vanish, i.e. `f` is compactly supported inside the grid.
    pub fn is_compactly_supported(&self) -> bool {
        self.tail.is_none() && self.values[0] == 0.0 && self.values[self.values.len() - 1] == 0.0
    }

    /// Pointwise map; the tail model is dropped.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Pointwise map with access to the node coordinate; the tail is dropped.
    pub fn map_with_x(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn abs(&self) -> Self {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
            tail: self.tail,
        }
    }

    /// `c · f`, tail scaled accordingly.
    pub fn scale(&self, c: f64) -> Self {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            tail: self.tail.map(|t| TailModel {
                coeff_left: t.coeff_left * c.abs(),
                coeff_right: t.coeff_right * c.abs(),
                ..t
            }),
        }
    }

    /// Pointwise combination of two functions on the same grid; tails dropped.
    pub fn zip_with(&self, other: &SampledFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid != other.grid {
            return Err(invalid("grid", "functions live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `∫ f` over the grid (midpoint rule, no tail).
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.widths())
            .map(|(v, w)| v * w)
            .sum()
    }
}

/// Function on a tensor grid, stored row-major as `values[ix * ny + iy]`.
///
/// When the function is known to be a tensor product `f(x) g(y)` the factors
/// are kept, and norms use them together with their tail models.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction2D {
    grid_x: Arc<Grid>,
    grid_y: Arc<Grid>,
    values: Vec<f64>,
    factors: Option<(SampledFunction, SampledFunction)>,
}

impl SampledFunction2D {
    pub fn new(grid_x: Arc<Grid>, grid_y: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid_x.len() * grid_y.len() {
            return Err(invalid(
                "values",
                format!(
                    "expected {}x{} values, got {}",
                    grid_x.len(),
                    grid_y.len(),
                    values.len()
                ),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "values must be finite"));
        }
        Ok(SampledFunction2D {
            grid_x,
            grid_y,
            values,
            factors: None,
        })
    }

    /// `f(x) g(y)` on the product grid, remembering the factors.
    pub fn tensor(f: &SampledFunction, g: &SampledFunction) -> Self {
        let (nx, ny) = (f.len(), g.len());
        let mut values = Vec::with_capacity(nx * ny);
        for &a in f.values() {
            for &b in g.values() {
                values.push(a * b);
            }
        }
        SampledFunction2D {
            grid_x: f.grid().clone(),
            grid_y: g.grid().clone(),
            values,
            factors: Some((f.clone(), g.clone())),
        }
    }

    pub fn grid_x(&self) -> &Arc<Grid> {
        &self.grid_x
    }

    pub fn grid_y(&self) -> &Arc<Grid> {
        &self.grid_y
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid_x.len(), self.grid_y.len())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.grid_y.len() + iy]
    }

    pub fn factors(&self) -> Option<&(SampledFunction, SampledFunction)> {
        self.factors.as_ref()
    }

    pub(crate) fn with_factors(mut self, factors: (SampledFunction, SampledFunction)) -> Self {
        self.factors = Some(factors);
        self
    }
}
