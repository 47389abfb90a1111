//! One-dimensional midpoint grids.
//!
//! A grid is a partition of `[lo, hi]` into cells; values live at cell
//! midpoints and every integral is a midpoint rule over the cells. Functions
//! are treated as piecewise constant on cells, which is what makes interval
//! averages and maximal functions exact on the grid.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    /// Two core cells `[-a, 0]`, `[0, a]` plus geometric tails.
    Geometric,
    /// Uniform core on `[-a, a]` plus geometric tails out to `±R`.
    Hybrid,
    /// Explicit cell edges.
    Custom,
}

/// Parameters accepted by [`Grid::build`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub kind: GridKind,
    pub core_halfwidth: f64,
    pub extent: f64,
    pub core_points: usize,
    pub ratio: f64,
}

impl GridSpec {
    pub fn hybrid(core_halfwidth: f64, extent: f64, core_points: usize, ratio: f64) -> Self {
        GridSpec {
            kind: GridKind::Hybrid,
            core_halfwidth,
            extent,
            core_points,
            ratio,
        }
    }

    pub fn uniform(extent: f64, points: usize) -> Self {
        GridSpec {
            kind: GridKind::Uniform,
            core_halfwidth: extent,
            extent,
            core_points: points,
            ratio: 2.0,
        }
    }

    /// Number of geometric cells on each side, `ceil(ln(R/a) / ln ratio)`.
    pub fn tail_cells(&self) -> usize {
        if self.extent <= self.core_halfwidth {
            return 0;
        }
        ((self.extent / self.core_halfwidth).ln() / self.ratio.ln()).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    kind: GridKind,
    edges: Vec<f64>,
    nodes: Vec<f64>,
    widths: Vec<f64>,
    anchor: usize,
}

impl Grid {
    pub fn build(spec: &GridSpec) -> Result<Self> {
        let GridSpec {
            kind,
            core_halfwidth: a,
            extent: r,
            core_points,
            ratio,
        } = *spec;
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid(
                "core_halfwidth",
                format!("must be positive, got {a}"),
            ));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("extent", format!("must be positive, got {r}")));
        }
        if a > r {
            return Err(invalid(
                "core_halfwidth",
                format!("core half-width {a} exceeds extent {r}"),
            ));
        }
        match kind {
            GridKind::Uniform => {
                if core_points < 1 {
                    return Err(invalid("core_points", "need at least one cell"));
                }
                let h = 2.0 * r / core_points as f64;
                let mut edges: Vec<f64> = (0..=core_points).map(|i| -r + h * i as f64).collect();
                // exact endpoints and an exact zero when it is an edge
                edges[0] = -r;
                edges[core_points] = r;
                if core_points % 2 == 0 {
                    edges[core_points / 2] = 0.0;
                }
                Self::assemble(GridKind::Uniform, edges)
            }
            GridKind::Geometric | GridKind::Hybrid => {
                if !(ratio > 1.0 && ratio <= 2.0) {
                    return Err(invalid("ratio", format!("must lie in (1, 2], got {ratio}")));
                }
                let core = if kind == GridKind::Geometric {
                    2
                } else {
                    core_points
                };
                if core < 2 {
                    return Err(invalid(
                        "core_points",
                        format!("need at least 2, got {core}"),
                    ));
                }
                let n_tail = spec.tail_cells();
                // snap the last edge to R by shrinking the ratio slightly
                let r_eff = if n_tail > 0 {
                    (r / a).powf(1.0 / n_tail as f64)
                } else {
                    ratio
                };
                let mut right = Vec::with_capacity(n_tail);
                let mut e = a;
                for j in 1..=n_tail {
                    e *= r_eff;
                    right.push(if j == n_tail { r } else { e });
                }
                let h = 2.0 * a / core as f64;
                let mut edges = Vec::with_capacity(core + 2 * n_tail + 1);
                edges.extend(right.iter().rev().map(|x| -x));
                for i in 0..=core {
                    edges.push(-a + h * i as f64);
                }
                let off = n_tail;
                edges[off] = -a;
                edges[off + core] = a;
                if core % 2 == 0 {
                    edges[off + core / 2] = 0.0;
                }
                edges.extend(right.iter().copied());
                Self::assemble(kind, edges)
            }
            GridKind::Custom => Err(invalid(
                "kind",
                "custom grids are built with Grid::from_edges",
            )),
        }
    }

    /// Grid from explicit, strictly increasing cell edges.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(invalid("edges", "need at least two edges"));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(invalid("edges", "edges must be finite"));
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("edges", "edges must be strictly increasing"));
        }
        Self::assemble(GridKind::Custom, edges)
    }

    /// Grid on `[-R, R]` refined geometrically toward each of `breaks`.
    ///
    /// Around a break `b` the cell widths grow from `finest` by `ratio` out to
    /// half the distance to the neighbouring break (at most 1); beyond the outer breaks
    /// the widths keep growing by `ratio` up to `R`. Refinement toward a
    /// nonzero break stops at the spacing of floats near `b`.
    pub fn graded(breaks: &[f64], finest: f64, ratio: f64, extent: f64) -> Result<Self> {
        if breaks.is_empty() || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(
                "breaks",
                "need a strictly increasing, nonempty list",
            ));
        }
        if !(finest > 0.0) {
            return Err(invalid("finest", "finest width must be positive"));
        }
        if !(ratio > 1.0 && ratio <= 2.0) {
            return Err(invalid("ratio", format!("must lie in (1, 2], got {ratio}")));
        }
        let (first, last) = (breaks[0], breaks[breaks.len() - 1]);
        if !(extent > first.abs().max(last.abs()) + 1.0) {
            return Err(invalid(
                "extent",
                "extent must clear the outer breaks by at least 1",
            ));
        }
        let mut edges = vec![-extent, extent];
        let mut outer = (first, 0.0f64, last, 0.0f64);
        for (i, &b) in breaks.iter().enumerate() {
            let left = if i > 0 {
                0.5 * (b - breaks[i - 1])
            } else {
                f64::INFINITY
            };
            let right = if i + 1 < breaks.len() {
                0.5 * (breaks[i + 1] - b)
            } else {
                f64::INFINITY
            };
            let h = left.min(right).min(1.0);
            // rings of width w, w·r, w·r², … on each side of b
            let mut w = finest.max(64.0 * f64::EPSILON * b.abs());
            let mut t = w;
            let mut prev = 0.0;
            edges.push(b);
            while t < h {
                edges.push(b - t);
                edges.push(b + t);
                prev = t;
                w *= ratio;
                t += w;
            }
            let last_w = w / ratio;
            // a sliver before b ± h is merged into its neighbour
            if prev > 0.0 && h - prev < 0.5 * last_w {
                edges.truncate(edges.len() - 2);
            }
            edges.push(b - h);
            edges.push(b + h);
            if i == 0 {
                outer.0 = b - h;
                outer.1 = last_w;
            }
            if i + 1 == breaks.len() {
                outer.2 = b + h;
                outer.3 = last_w;
            }
        }
        // geometric continuation to ±R
        let (mut x, mut w) = (outer.0, outer.1);
        while x - w * ratio > -extent {
            w *= ratio;
            x -= w;
            edges.push(x);
        }
        let (mut x, mut w) = (outer.2, outer.3);
        while x + w * ratio < extent {
            w *= ratio;
            x += w;
            edges.push(x);
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        // drop slivers left next to ±R
        let n = edges.len();
        if n > 3 && edges[1] - edges[0] < 0.5 * (edges[2] - edges[1]) {
            edges.remove(1);
        }
        let n = edges.len();
        if n > 3 && edges[n - 1] - edges[n - 2] < 0.5 * (edges[n - 2] - edges[n - 3]) {
            edges.remove(n - 2);
        }
        Self::assemble(GridKind::Custom, edges)
    }

    fn assemble(kind: GridKind, edges: Vec<f64>) -> Result<Self> {
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("ratio", "parameters produce non-monotone edges"));
        }
        let widths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let nodes: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let anchor = edges
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        Ok(Grid {
            kind,
            edges,
            nodes,
            widths,
            anchor,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Number of cells (= number of nodes).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn lo(&self) -> f64 {
        self.edges[0]
    }

    pub fn hi(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    /// `max(|lo|, |hi|)`; equals `R` for the symmetric builders.
    pub fn extent(&self) -> f64 {
        self.lo().abs().max(self.hi().abs())
    }

    /// Index of the edge closest to the origin; cumulative sums are anchored
    /// there so that short intervals near 0 keep full relative precision.
    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// Index of the cell containing `x` (half-open on the right, except the
    /// last cell which includes `hi`).
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo() && x <= self.hi()) {
            return None;
        }
        let k = self.edges.partition_point(|&e| e <= x);
        Some(k.saturating_sub(1).min(self.len() - 1))
    }

    /// True when `edges` is symmetric about 0 to rounding.
    pub fn is_symmetric(&self) -> bool {
        let n = self.edges.len();
        (0..n).all(|i| {
            let (a, b) = (self.edges[i], -self.edges[n - 1 - i]);
            (a - b).abs() <= 1e-12 * a.abs().max(1.0)
        })
    }

    pub fn total_width(&self) -> f64 {
        self.widths.iter().sum()
    }

    /// Cell indices whose midpoints lie in `[lo, hi]`.
    pub fn nodes_within(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.nodes.partition_point(|&x| x < lo);
        let b = self.nodes.partition_point(|&x| x <= hi);
        a..b.max(a)
    }
}
