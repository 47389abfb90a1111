//! Log-log regression for endpoint orders.

use crate::error::{invalid, LabError, Result};

use super::NormSample;

/// Fewest usable samples a fit accepts.
pub const MIN_SAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub r2: f64,
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(invalid("samples", "x and y lengths differ"));
    }
    if n < 2 {
        return Err(LabError::InsufficientSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("samples", "all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        stderr,
        r2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentKind {
    /// Order of blow-up as `p → 1`, in powers of `(p-1)^{-1}`.
    Alpha,
    /// Growth as `p → ∞`, in powers of `p`.
    Gamma,
}

impl std::fmt::Display for ExponentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExponentKind::Alpha => "alpha",
            ExponentKind::Gamma => "gamma",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub kind: ExponentKind,
    pub exponent: f64,
    pub stderr: f64,
    pub r2: f64,
    /// Smallest and largest `p` used.
    pub p_range: (f64, f64),
    /// Some sample had `(p-1)·log R` below the saturation threshold.
    pub saturated: bool,
    pub samples: usize,
}

fn usable(samples: &[NormSample]) -> Vec<&NormSample> {
    samples
        .iter()
        .filter(|s| !s.divergent && s.norm.is_finite() && s.norm > 0.0)
        .collect()
}

fn estimate(
    kind: ExponentKind,
    used: &[&NormSample],
    x: impl Fn(f64) -> f64,
) -> Result<ExponentEstimate> {
    if used.len() < MIN_SAMPLES {
        return Err(LabError::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: used.len(),
        });
    }
    let xs: Vec<f64> = used.iter().map(|s| x(s.p)).collect();
    let ys: Vec<f64> = used.iter().map(|s| s.norm.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    let lo = used.iter().map(|s| s.p).fold(f64::INFINITY, f64::min);
    let hi = used.iter().map(|s| s.p).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentEstimate {
        kind,
        exponent: fit.slope,
        stderr: fit.stderr,
        r2: fit.r2,
        p_range: (lo, hi),
        saturated: used.iter().any(|s| s.saturated),
        samples: used.len(),
    })
}

/// Slope of `log ‖T‖_p` against `-log(p-1)`. Divergent samples are skipped;
/// saturated ones are kept and flag the estimate.
pub fn fit_alpha(samples: &[NormSample]) -> Result<ExponentEstimate> {
    let used = usable(samples);
    if let Some(s) = used.iter().find(|s| !(s.p > 1.0)) {
        return Err(invalid("p", format!("alpha fits need p > 1, got {}", s.p)));
    }
    estimate(ExponentKind::Alpha, &used, |p| -(p - 1.0).ln())
}

/// Slope of `log ‖T‖_p` against `log p`, for `p ≥ 4`.
pub fn fit_gamma(samples: &[NormSample]) -> Result<ExponentEstimate> {
    let used = usable(samples);
    if let Some(s) = used.iter().find(|s| s.p < 4.0) {
        return Err(invalid("p", format!("gamma fits need p ≥ 4, got {}", s.p)));
    }
    estimate(ExponentKind::Gamma, &used, f64::ln)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: f64, norm: f64) -> NormSample {
        NormSample {
            p,
            norm,
            test_set: "synthetic".into(),
            extent: 1.0,
            saturated: false,
            divergent: false,
        }
    }

    #[test]
    fn recovers_synthetic_alpha() {
        let s: Vec<_> = (2..=7)
            .map(|k| {
                let e = 2f64.powi(-k);
                sample(1.0 + e, 3.7 * e.powf(-1.35))
            })
            .collect();
        let f = fit_alpha(&s).unwrap();
        assert!((f.exponent - 1.35).abs() < 1e-6);
        assert!(f.r2 > 1.0 - 1e-12);
        assert!(f.stderr < 1e-6);
    }

    #[test]
    fn recovers_synthetic_gamma() {
        let s: Vec<_> = [4.0, 8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&p| sample(p, 0.3 * p.powf(0.5)))
            .collect();
        assert!((fit_gamma(&s).unwrap().exponent - 0.5).abs() < 1e-6);
        assert!(fit_gamma(&vec![sample(2.0, 1.0); 4]).is_err());
    }

    #[test]
    fn too_few_samples() {
        let s = vec![sample(1.5, 2.0), sample(1.25, 4.0), sample(1.1, 9.0)];
        assert!(matches!(
            fit_alpha(&s),
            Err(LabError::InsufficientSamples { .. })
        ));
    }
}
