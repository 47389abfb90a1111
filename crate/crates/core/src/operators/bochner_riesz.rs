//! Bochner–Riesz kernels and the endpoint integral over the set where the
//! kernel's oscillating factor stays away from zero.

use std::f64::consts::{FRAC_PI_3, PI};

use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};

use super::bessel::{bessel_j, bessel_phase};

/// Explicit intervals summed before the Euler–Maclaurin tail takes over.
const EXPLICIT_INTERVALS: usize = 4096;

/// `K_λ(x) = Γ(λ+1)/π^λ · J_{n/2+λ}(2π|x|) / |x|^{n/2+λ}` for `n ∈ {1, 2}`.
pub fn br_kernel(lambda: f64, n: u32, x: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(invalid("lambda", "must be non-negative"));
    }
    if !(n == 1 || n == 2) {
        return Err(invalid("n", format!("dimension must be 1 or 2, got {n}")));
    }
    if x == 0.0 || !x.is_finite() {
        return Err(invalid("x", "kernel is evaluated off the origin"));
    }
    let eta = n as f64 / 2.0 + lambda;
    let r = x.abs();
    Ok(gamma(lambda + 1.0) / PI.powf(lambda) * bessel_j(eta, 2.0 * PI * r)? / r.powf(eta))
}

/// `a^s - b^s` for nearby positive `a`, `b`.
fn pow_diff(a: f64, b: f64, s: f64) -> f64 {
    b.powf(s) * (s * ((a - b) / b).ln_1p()).exp_m1()
}

/// `∫_c^d r^{-p} dr`.
fn power_integral(c: f64, d: f64, p: f64) -> f64 {
    -pow_diff(d, c, 1.0 - p) / (p - 1.0)
}

/// `∫_{A ∩ (r1, R)} r^{-p} dr` with `A = {r : |cos(r - τ)| > 1/2}` and `τ` the
/// phase of `J_{n-1/2}`, the order of the critical kernel `K_{(n-1)/2}`.
///
/// `A` is the union of `(τ + jπ - π/3, τ + jπ + π/3)`. With `r_max = None`
/// the range is unbounded: the first intervals are summed exactly and the
/// rest by Euler–Maclaurin on `g(j) = ∫_{c+jπ}^{d+jπ} r^{-p}`.
pub fn br_endpoint_integral(n: u32, p: f64, r1: f64, r_max: Option<f64>) -> Result<f64> {
    if !(n == 1 || n == 2) {
        return Err(invalid("n", format!("dimension must be 1 or 2, got {n}")));
    }
    if !(p > 1.0 && p < 2.0) {
        return Err(invalid("p", format!("need 1 < p < 2, got {p}")));
    }
    if !(r1 > 0.0) {
        return Err(invalid("r1", "must be positive"));
    }
    if let Some(r) = r_max {
        if !(r > r1) {
            return Err(invalid("R", "need r1 < R"));
        }
    }
    let tau = bessel_phase(n as f64 - 0.5);
    let (c, d) = (tau - FRAC_PI_3, tau + FRAC_PI_3);
    // first j whose interval ends beyond r1
    let mut j = ((r1 - d) / PI).floor().max(0.0) as u64;
    while d + j as f64 * PI <= r1 {
        j += 1;
    }
    let upper = r_max.unwrap_or(f64::INFINITY);
    let mut total = 0.0;
    let mut count = 0;
    loop {
        let shift = j as f64 * PI;
        let (lo, hi) = ((c + shift).max(r1), (d + shift).min(upper));
        if lo >= upper {
            return Ok(total);
        }
        total += power_integral(lo, hi, p);
        j += 1;
        count += 1;
        if r_max.is_none() && count >= EXPLICIT_INTERVALS {
            break;
        }
    }
    let jf = j as f64;
    let (cj, dj) = (c + jf * PI, d + jf * PI);
    let integral = pow_diff(dj, cj, 2.0 - p) / (PI * (2.0 - p) * (p - 1.0));
    let g = power_integral(cj, dj, p);
    let dg = -PI * (cj.powf(-p) - dj.powf(-p));
    Ok(total + integral + g / 2.0 - dg / 12.0)
}
