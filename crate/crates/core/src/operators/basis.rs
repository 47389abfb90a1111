use std::fmt;

use crate::dyadic::DyadicFamily;
use crate::error::{invalid, LabError, Result};
use crate::function::SampledFunction;
use crate::grid::Grid;
use crate::par;
use crate::quadrature::Primitive;

use super::maximal::{attach_tail, hl_maximal};

/// A finite family of sets defining `M_B`.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// All intervals with ends at grid edges or nodes.
    Intervals,
    /// Sets `(0, b)`; the associated maximal operator is Calderón's `N`.
    OriginAnchored,
    /// Axis-parallel rectangles on a tensor grid (see `strong_maximal_2d`).
    Rectangles2D,
    Dyadic(DyadicFamily),
    /// An explicit list of open intervals.
    Sets(Vec<(f64, f64)>),
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Intervals => write!(f, "intervals"),
            Basis::OriginAnchored => write!(f, "origin_anchored"),
            Basis::Rectangles2D => write!(f, "rectangles_2d"),
            Basis::Dyadic(d) => {
                let (lo, hi) = d.root(0);
                write!(
                    f,
                    "dyadic[{lo},{hi}) depth {} shifts {:?}",
                    d.depth(),
                    d.shifts()
                )
            }
            Basis::Sets(s) => write!(f, "{} explicit sets", s.len()),
        }
    }
}

impl Basis {
    /// Member sets meeting the grid, as `(lo, hi)` pairs in canonical order.
    pub fn enumerate(&self, grid: &Grid) -> Result<Vec<(f64, f64)>> {
        let e = grid.edges();
        let sets: Vec<(f64, f64)> = match self {
            Basis::Intervals => {
                let mut v = Vec::with_capacity(e.len() * e.len() / 2);
                for a in 0..e.len() {
                    for b in a + 1..e.len() {
                        v.push((e[a], e[b]));
                    }
                }
                v
            }
            Basis::OriginAnchored => e.iter().filter(|&&b| b > 0.0).map(|&b| (0.0, b)).collect(),
            Basis::Dyadic(d) => d.cubes_within(grid.lo(), grid.hi()),
            Basis::Sets(s) => s
                .iter()
                .copied()
                .filter(|&(lo, hi)| hi > grid.lo() && lo < grid.hi())
                .collect(),
            Basis::Rectangles2D => {
                return Err(invalid(
                    "basis",
                    "rectangles live on tensor grids; use strong_maximal_2d",
                ))
            }
        };
        if sets.is_empty() {
            return Err(LabError::EmptyFamily("no member set meets the grid"));
        }
        Ok(sets)
    }
}

/// `M_B f(x) = sup_{x ∈ B} avg_B |f|`, zero where no member contains `x`.
pub fn basis_maximal(f: &SampledFunction, basis: &Basis) -> Result<SampledFunction> {
    let grid = f.grid();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let prim = Primitive::new(grid, &abs);
    let nodes = grid.nodes();
    let values = match basis {
        Basis::Intervals => return Ok(hl_maximal(f)),
        Basis::OriginAnchored => {
            if grid.lo() > 0.0 {
                return Err(LabError::OutsideSupport {
                    lo: 0.0,
                    hi: grid.hi(),
                });
            }
            // F(b)/b is monotone in b inside a cell, so b ∈ edges ∪ {x}
            let e = grid.edges();
            let mut suffix = vec![0.0f64; e.len() + 1];
            for b in (0..e.len()).rev() {
                let here = if e[b] > 0.0 {
                    prim.integral(0.0, e[b]) / e[b]
                } else {
                    0.0
                };
                suffix[b] = suffix[b + 1].max(here);
            }
            let out: Vec<f64> = (0..nodes.len())
                .map(|i| {
                    let x = nodes[i];
                    if x <= 0.0 {
                        0.0
                    } else {
                        (prim.integral(0.0, x) / x).max(suffix[i + 1])
                    }
                })
                .collect();
            let tail = f.is_compactly_supported().then_some((0.0, 1.0));
            let g = SampledFunction::new(grid.clone(), out)?;
            return Ok(attach_tail(g, tail));
        }
        Basis::Dyadic(d) => par::map_range(nodes.len(), |i| {
            let x = nodes[i];
            let mut best = 0.0f64;
            for s in 0..d.shifts().len() {
                for level in 0..=d.depth() {
                    match d.containing(s, level, x) {
                        Some((lo, hi)) if lo >= grid.lo() && hi <= grid.hi() => {
                            best = best.max(prim.integral(lo, hi) / (hi - lo));
                        }
                        Some(_) => {}
                        None => break,
                    }
                }
            }
            best
        }),
        Basis::Sets(sets) => par::map_range(nodes.len(), |i| {
            let x = nodes[i];
            sets.iter()
                .filter(|&&(lo, hi)| lo < x && x < hi)
                .map(|&(lo, hi)| prim.average(lo, hi))
                .fold(0.0, f64::max)
        }),
        Basis::Rectangles2D => {
            return Err(invalid(
                "basis",
                "rectangles live on tensor grids; use strong_maximal_2d",
            ))
        }
    };
    SampledFunction::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    #[test]
    fn calderon_operator_on_indicator() {
        let g =
            Arc::new(Grid::from_edges(vec![-1.0, 0.0, 0.25, 0.75, 1.0, 1.5, 2.5, 3.0]).unwrap());
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let n = basis_maximal(&f, &Basis::OriginAnchored).unwrap();
        assert_eq!(n.values()[0], 0.0);
        assert_relative_eq!(n.values()[2], 1.0); // x = 0.5
        assert_relative_eq!(n.values()[5], 0.5); // x = 2: best b = 2
    }

    #[test]
    fn intervals_basis_is_hl() {
        let g = Arc::new(Grid::build(&GridSpec::uniform(2.0, 16)).unwrap());
        let f = SampledFunction::from_fn(g, |x| x.sin()).unwrap();
        assert_eq!(
            basis_maximal(&f, &Basis::Intervals).unwrap(),
            hl_maximal(&f)
        );
    }

    #[test]
    fn dyadic_maximal_on_indicator() {
        let g = Arc::new(Grid::build(&GridSpec::uniform(2.0, 16)).unwrap());
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let d = DyadicFamily::new(-2.0, 2.0, 4).unwrap();
        let m = basis_maximal(&f, &Basis::Dyadic(d)).unwrap();
        // x in [1, 2): best dyadic cube containing it is [0, 2)
        let i = g.locate(1.5).unwrap();
        assert_relative_eq!(m.values()[i], 0.5);
        let j = g.locate(-1.5).unwrap();
        assert_relative_eq!(m.values()[j], 0.25);
    }

    #[test]
    fn single_set_basis() {
        let g = Arc::new(Grid::build(&GridSpec::uniform(2.0, 16)).unwrap());
        let f = SampledFunction::indicator(g.clone(), 0.0, 1.0);
        let m = basis_maximal(&f, &Basis::Sets(vec![(0.0, 1.0)])).unwrap();
        assert_eq!(m.values(), f.values());
        assert!(Basis::Rectangles2D.enumerate(&g).is_err());
        assert!(Basis::Sets(vec![(5.0, 6.0)]).enumerate(&g).is_err());
    }
}
