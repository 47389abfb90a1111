//! Dyadic families: a root interval, its dyadic descendants down to a fixed
//! depth, and optional translated copies of the whole tree.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicFamily {
    root_lo: f64,
    root_len: f64,
    depth: u32,
    /// Translations of the root, as fractions of the root length.
    shifts: Vec<f64>,
}

impl DyadicFamily {
    pub fn new(lo: f64, hi: f64, depth: u32) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(invalid("root", format!("need lo < hi, got [{lo}, {hi})")));
        }
        if depth < 1 {
            return Err(invalid("depth", "depth must be at least 1"));
        }
        if depth > 1000 {
            return Err(invalid(
                "depth",
                format!("depth {depth} underflows the root length"),
            ));
        }
        Ok(DyadicFamily {
            root_lo: lo,
            root_len: hi - lo,
            depth,
            shifts: vec![0.0],
        })
    }

    /// Replace the shift set; `0` is always included first.
    pub fn with_shifts(mut self, shifts: &[f64]) -> Result<Self> {
        if shifts.iter().any(|s| !s.is_finite()) {
            return Err(invalid("shifts", "shifts must be finite"));
        }
        let mut all = vec![0.0];
        all.extend(shifts.iter().copied().filter(|&s| s != 0.0));
        self.shifts = all;
        Ok(self)
    }

    /// The one-third trick: shifts `{0, 1/3}`.
    pub fn one_third(lo: f64, hi: f64, depth: u32) -> Result<Self> {
        Self::new(lo, hi, depth)?.with_shifts(&[1.0 / 3.0])
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn root(&self, shift: usize) -> (f64, f64) {
        let lo = self.root_lo + self.shifts[shift] * self.root_len;
        (lo, lo + self.root_len)
    }

    pub fn side(&self, level: u32) -> f64 {
        self.root_len * 0.5f64.powi(level as i32)
    }

    pub fn cube(&self, shift: usize, level: u32, j: u64) -> (f64, f64) {
        let (lo, _) = self.root(shift);
        let h = self.side(level);
        (lo + h * j as f64, lo + h * (j + 1) as f64)
    }

    /// Cube of generation `level` containing `x` in the tree `shift`.
    pub fn containing(&self, shift: usize, level: u32, x: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.root(shift);
        if !(x >= lo && x < hi) {
            return None;
        }
        let h = self.side(level);
        let j = ((x - lo) / h).floor();
        let a = lo + h * j;
        Some((a, a + h))
    }

    /// Parent of the cube `(level, j)`; the root is its own parent.
    pub fn parent(level: u32, j: u64) -> (u32, u64) {
        if level == 0 {
            (0, 0)
        } else {
            (level - 1, j / 2)
        }
    }

    /// Every cube of every tree, coarse to fine, optionally keeping only cubes
    /// inside `[lo, hi]`. Only meant for modest depths.
    pub fn cubes_within(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for s in 0..self.shifts.len() {
            for level in 0..=self.depth.min(24) {
                for j in 0..(1u64 << level) {
                    let c = self.cube(s, level, j);
                    if c.0 >= lo && c.1 <= hi {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    pub fn cubes(&self) -> Vec<(f64, f64)> {
        self.cubes_within(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Number of leaves per tree, `2^depth`.
    pub fn leaves(&self) -> f64 {
        2f64.powi(self.depth as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_partition_parent() {
        let d = DyadicFamily::new(0.0, 2.0, 4).unwrap();
        for level in 1..=4u32 {
            for j in 0..(1u64 << level) {
                let (pl, pj) = DyadicFamily::parent(level, j);
                let p = d.cube(0, pl, pj);
                let c = d.cube(0, level, j);
                assert!(c.0 >= p.0 && c.1 <= p.1);
                assert_eq!(c.1 - c.0, 0.5 * (p.1 - p.0));
            }
        }
        assert_eq!(d.cubes().len(), 31);
        assert_eq!(d.containing(0, 4, 1.99), Some((1.875, 2.0)));
        assert_eq!(d.containing(0, 1, 2.0), None);
    }

    #[test]
    fn shifted_cubes_are_clipped() {
        let d = DyadicFamily::one_third(-1.0, 1.0, 3).unwrap();
        let all = d.cubes_within(-1.0, 1.0);
        assert_eq!(d.shifts().len(), 2);
        // unshifted tree fully inside: 15 cubes; shifted tree loses the root
        assert!(all.len() > 15 && all.len() < 30);
        assert!(all.iter().all(|c| c.0 >= -1.0 && c.1 <= 1.0));
        assert!(DyadicFamily::new(1.0, 0.0, 3).is_err());
        assert!(DyadicFamily::new(0.0, 1.0, 0).is_err());
    }
}
