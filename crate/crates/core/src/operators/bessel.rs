//! Bessel functions `J_η` for integer and half-integer `η`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

/// Largest supported order.
pub const MAX_ORDER: f64 = 8.0;
/// Series below, Hankel asymptotic above (integer orders).
pub const R_SWITCH: f64 = 12.0;

fn check_order(eta: f64) -> Result<()> {
    let twice = 2.0 * eta;
    if !((0.0..=MAX_ORDER).contains(&eta) && twice == twice.round()) {
        return Err(invalid(
            "eta",
            format!("order must be an integer or half-integer in [0, {MAX_ORDER}], got {eta}"),
        ));
    }
    Ok(())
}

fn is_half_integer(eta: f64) -> bool {
    (2.0 * eta) as i64 % 2 == 1
}

/// Phase of the large-argument asymptotic `J_η(r) ≈ √(2/πr) cos(r - τ)`.
pub fn bessel_phase(eta: f64) -> f64 {
    eta * FRAC_PI_2 + FRAC_PI_4
}

/// Ascending series `Σ (-1)^m (r/2)^{2m+η} / (m! Γ(m+η+1))`.
pub fn bessel_j_series(eta: f64, r: f64) -> Result<f64> {
    check_order(eta)?;
    if r < 0.0 {
        return Err(invalid("r", "argument must be non-negative"));
    }
    if r == 0.0 {
        return Ok(if eta == 0.0 { 1.0 } else { 0.0 });
    }
    let h = 0.5 * r;
    let mut term = (eta * h.ln() - ln_gamma(eta + 1.0)).exp();
    let mut sum = term;
    let q = -h * h;
    for m in 1..500 {
        let m = m as f64;
        term *= q / (m * (m + eta));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(f64::MIN_POSITIVE) && m > h {
            break;
        }
    }
    Ok(sum)
}

/// Hankel expansion `√(2/πr) (P cos χ - Q sin χ)`, `χ = r - τ`, truncated at
/// its smallest term.
pub fn bessel_j_asymptotic(eta: f64, r: f64) -> Result<f64> {
    check_order(eta)?;
    if r <= 0.0 {
        return Err(invalid("r", "asymptotic form needs r > 0"));
    }
    let mu = 4.0 * eta * eta;
    let (mut p, mut q) = (0.0, 0.0);
    let mut a = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let j = 2 * k - 1;
            a *= (mu - (j * j) as f64) / (k as f64 * 8.0 * r);
        }
        if a.abs() > prev || a == 0.0 && k > 0 {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
        prev = a.abs();
    }
    let chi = r - bessel_phase(eta);
    Ok((2.0 / (PI * r)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// Half-integer orders in closed form: `J_{1/2}`, `J_{-1/2}` and upward
/// recurrence (stable for `r > η`; the series covers the rest).
pub fn bessel_j_half(eta: f64, r: f64) -> Result<f64> {
    check_order(eta)?;
    if !is_half_integer(eta) {
        return Err(invalid("eta", format!("{eta} is not a half-integer")));
    }
    if r <= eta {
        return bessel_j_series(eta, r);
    }
    let s = (2.0 / (PI * r)).sqrt();
    let (mut jm, mut j) = (s * r.cos(), s * r.sin());
    let mut nu = 0.5;
    while nu < eta {
        let next = 2.0 * nu / r * j - jm;
        jm = j;
        j = next;
        nu += 1.0;
    }
    Ok(j)
}

/// `J_η(r)` for `r ≥ 0`.
pub fn bessel_j(eta: f64, r: f64) -> Result<f64> {
    check_order(eta)?;
    if r < 0.0 {
        return Err(invalid("r", "argument must be non-negative"));
    }
    if is_half_integer(eta) {
        bessel_j_half(eta, r)
    } else if r <= R_SWITCH {
        bessel_j_series(eta, r)
    } else {
        bessel_j_asymptotic(eta, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            bessel_j(0.5, FRAC_PI_2).unwrap(),
            2.0 / PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_j_series(0.5, FRAC_PI_2).unwrap(),
            2.0 / PI,
            max_relative = 1e-13
        );
        // J_0(1), J_1(1), J_0(20) reference values
        assert_relative_eq!(
            bessel_j(0.0, 1.0).unwrap(),
            0.765_197_686_557_966_6,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_j(1.0, 1.0).unwrap(),
            0.440_050_585_744_933_5,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_j(0.0, 20.0).unwrap(),
            0.167_024_664_340_583_1,
            max_relative = 1e-10
        );
    }

    #[test]
    fn regimes_agree_on_switch_window() {
        for eta in [0.0, 0.5, 1.0, 1.5] {
            for k in 0..=40 {
                let r = 10.0 + 0.1 * k as f64;
                let a = bessel_j_series(eta, r).unwrap();
                let b = bessel_j_asymptotic(eta, r).unwrap();
                assert!((a - b).abs() < 1e-6, "eta={eta} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn half_integer_recurrence_matches_series() {
        for eta in [1.5, 2.5, 3.5] {
            for r in [4.0, 7.5, 11.0] {
                let a = bessel_j_half(eta, r).unwrap();
                let b = bessel_j_series(eta, r).unwrap();
                assert!((a - b).abs() < 1e-12, "eta={eta} r={r}");
            }
        }
    }

    #[test]
    fn unsupported_orders() {
        assert!(bessel_j(0.3, 1.0).is_err());
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_j(9.0, 1.0).is_err());
    }
}
