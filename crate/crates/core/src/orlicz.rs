//! Young functions `Φ_λ(t) = t log^λ(e + t)` and localized Luxemburg norms.

use crate::error::{invalid, LabError, Result};
use crate::function::SampledFunction;

/// Relative tolerance of every bisection in this module.
pub const BISECTION_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrliczGauge {
    lambda: f64,
}

impl OrliczGauge {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(
                "lambda",
                format!("must be a finite number >= 0, got {lambda}"),
            ));
        }
        Ok(OrliczGauge { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `Φ_λ(t)` for `t ≥ 0`, without input checks.
    #[inline]
    pub fn phi(&self, t: f64) -> f64 {
        if self.lambda == 0.0 {
            t
        } else {
            t * (std::f64::consts::E + t).ln().powf(self.lambda)
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(invalid(
                "t",
                format!("gauge argument must be >= 0, got {t}"),
            ));
        }
        Ok(self.phi(t))
    }

    /// `Φ_λ^{-1}(s)` by bisection on `[s / log^λ(e+s), s]`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(invalid("s", format!("gauge value must be >= 0, got {s}")));
        }
        if self.lambda == 0.0 || s == 0.0 || s.is_infinite() {
            return Ok(s);
        }
        let mut lo = s / (std::f64::consts::E + s).ln().powf(self.lambda);
        let mut hi = s;
        while hi - lo > BISECTION_RTOL * 0.01 * lo {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.phi(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Luxemburg norm of a function given by `(|value|, measure)` levels on a
    /// set of total measure `total`: the root `t` of `Σ μ_i Φ(v_i/t) = total`.
    pub fn luxemburg_levels(&self, levels: &[(f64, f64)], total: f64) -> f64 {
        let mut mass = 0.0;
        let mut top = 0.0f64;
        for &(v, mu) in levels {
            mass += v.abs() * mu;
            top = top.max(v.abs());
        }
        if top == 0.0 || total <= 0.0 {
            return 0.0;
        }
        let avg = mass / total;
        if self.lambda == 0.0 {
            return avg;
        }
        // Jensen gives Φ-average ≥ 1 at t = avg; at t = top/Φ^{-1}(1) every
        // term is ≤ 1.
        let inv1 = self.inverse(1.0).unwrap_or(1.0);
        let mut lo = avg;
        let mut hi = top / inv1;
        if hi < lo {
            std::mem::swap(&mut lo, &mut hi);
        }
        let excess = |t: f64| -> f64 {
            levels
                .iter()
                .map(|&(v, mu)| {
                    if v == 0.0 {
                        0.0
                    } else {
                        mu * self.phi(v.abs() / t)
                    }
                })
                .sum::<f64>()
                - total
        };
        while hi - lo > BISECTION_RTOL * 0.01 * lo {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `‖χ_E‖_{Φ,Q} = 1/Φ^{-1}(|Q|/|E|)`.
    pub fn indicator_norm(&self, set_fraction: f64) -> f64 {
        if set_fraction <= 0.0 {
            return 0.0;
        }
        1.0 / self.inverse(1.0 / set_fraction).unwrap_or(f64::INFINITY)
    }
}

/// Localized Luxemburg norm `‖f‖_{Φ,Q}` over `Q = [lo, hi]`. Cells cut by the
/// ends of `Q` count with their overlap.
pub fn luxemburg_norm(f: &SampledFunction, gauge: &OrliczGauge, lo: f64, hi: f64) -> Result<f64> {
    let grid = f.grid();
    let (a, b) = (lo.max(grid.lo()), hi.min(grid.hi()));
    if !(b > a) {
        return Err(LabError::OutsideSupport { lo, hi });
    }
    let levels: Vec<(f64, f64)> = grid
        .edges()
        .windows(2)
        .zip(f.values())
        .filter_map(|(w, &v)| {
            let overlap = w[1].min(b) - w[0].max(a);
            (overlap > 0.0).then_some((v, overlap))
        })
        .collect();
    let total: f64 = levels.iter().map(|l| l.1).sum();
    Ok(gauge.luxemburg_levels(&levels, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    #[test]
    fn identity_scale() {
        let g = OrliczGauge::new(0.0).unwrap();
        for t in [0.0, 1.0, 7.0] {
            assert_eq!(g.eval(t).unwrap(), t);
        }
        assert!(OrliczGauge::new(-1.0).is_err());
        assert!(g.eval(-1.0).is_err());
    }

    #[test]
    fn phi_one_at_one() {
        let g = OrliczGauge::new(1.0).unwrap();
        assert_relative_eq!(
            g.eval(1.0).unwrap(),
            1.313261687518223,
            max_relative = 1e-14
        );
    }

    #[test]
    fn inverse_round_trip() {
        for lambda in [0.5, 1.0, 2.5] {
            let g = OrliczGauge::new(lambda).unwrap();
            for t in [1e-6, 0.3, 1.0, 17.0, 4e5] {
                let s = g.phi(t);
                assert_relative_eq!(g.inverse(s).unwrap(), t, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn indicator_of_whole_set() {
        let grid = Arc::new(Grid::from_edges(vec![0.0, 0.25, 0.5, 1.0]).unwrap());
        let f = SampledFunction::indicator(grid, 0.0, 1.0);
        let g0 = OrliczGauge::new(0.0).unwrap();
        assert_eq!(luxemburg_norm(&f, &g0, 0.0, 1.0).unwrap(), 1.0);
        // t = log(e + 1/t)
        let g1 = OrliczGauge::new(1.0).unwrap();
        let t = luxemburg_norm(&f, &g1, 0.0, 1.0).unwrap();
        assert_relative_eq!(t, (std::f64::consts::E + 1.0 / t).ln(), max_relative = 1e-9);
        assert!(luxemburg_norm(&f, &g1, 2.0, 3.0).is_err());
    }
}
