//! Modified Bessel functions of the first kind, evaluated in the forms the
//! Tikhonov machinery needs: `ln I0(x)`, the ratio `I1(x)/I0(x)`, its inverse,
//! and higher-order ratios `I_p(x)/I0(x)`.
//!
//! Below [`SERIES_CUTOFF`] the ascending power series is used (all terms are
//! positive, so there is no cancellation). Above it the Hankel asymptotic
//! expansion is used with the `e^x / sqrt(2 pi x)` factor pulled out, which
//! keeps everything finite up to arbitrarily large arguments.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 30.0;
const MAX_TERMS: usize = 500;

/// Sum of `sum_k (x^2/4)^k / (k! (k+p)!)`, i.e. `I_p(x) / ((x/2)^p / p!)`
/// up to the `p!` normalization, which the callers cancel in ratios.
fn ascending_series(x: f64, p: u32) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + p as f64));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Hankel expansion of `I_nu(x) * sqrt(2 pi x) * e^{-x}`.
fn asymptotic_series(x: f64, nu: u32) -> f64 {
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = term * (-(mu - odd * odd)) / (k as f64 * 8.0 * x);
        // Asymptotic series: stop at the smallest term.
        if next.abs() >= prev_abs {
            break;
        }
        prev_abs = next.abs();
        term = next;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

fn check_arg(func: &'static str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 || x.is_infinite() {
        return Err(Error::Domain { func, value: x });
    }
    Ok(())
}

/// `ln I0(x)` for finite `x >= 0`.
pub fn log_bessel_i0(x: f64) -> Result<f64> {
    check_arg("log_bessel_i0", x)?;
    Ok(log_i0_unchecked(x))
}

pub(crate) fn log_i0_unchecked(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        ascending_series(x, 0).ln()
    } else {
        x - 0.5 * (2.0 * PI * x).ln() + asymptotic_series(x, 0).ln()
    }
}

/// The Bessel ratio `I1(x)/I0(x)`, in `[0, 1)` for `x >= 0`.
pub fn bessel_ratio(x: f64) -> Result<f64> {
    if x.is_infinite() && x > 0.0 {
        return Ok(1.0);
    }
    check_arg("bessel_ratio", x)?;
    Ok(ratio_unchecked(x))
}

pub(crate) fn ratio_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x < SERIES_CUTOFF {
        0.5 * x * ascending_series(x, 1) / ascending_series(x, 0)
    } else {
        asymptotic_series(x, 1) / asymptotic_series(x, 0)
    }
}

/// `I_p(x)/I0(x)` for `p >= 0`.
pub fn bessel_ratio_order(p: u32, x: f64) -> Result<f64> {
    check_arg("bessel_ratio_order", x)?;
    if p == 0 {
        return Ok(1.0);
    }
    if p == 1 {
        return Ok(ratio_unchecked(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let pf = p as f64;
    if x < SERIES_CUTOFF.max(pf * pf) {
        // (x/2)^p / p! computed in log form to dodge underflow in the product.
        let log_lead = pf * (0.5 * x).ln() - ln_factorial(p);
        let lead = log_lead.exp();
        Ok(lead * ascending_series(x, p) / ascending_series(x, 0))
    } else {
        Ok(asymptotic_series(x, p) / asymptotic_series(x, 0))
    }
}

fn ln_factorial(p: u32) -> f64 {
    (2..=p).map(|k| (k as f64).ln()).sum()
}

/// Derivative of the Bessel ratio, `A'(x) = 1 - A/x - A^2`.
fn ratio_derivative(x: f64, a: f64) -> f64 {
    if x < 1e-8 {
        0.5
    } else {
        1.0 - a / x - a * a
    }
}

/// Numeric inverse of [`bessel_ratio`]: returns `x` with `I1(x)/I0(x) = y`.
///
/// Safeguarded Newton iteration inside a bisection bracket. The bracket
/// starts at `[0, 1e6]` and is widened when `y` lies above `A(1e6)`.
pub fn inv_bessel_ratio(y: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::Domain {
            func: "inv_bessel_ratio",
            value: y,
        });
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = 1e6_f64;
    while ratio_unchecked(hi) < y {
        lo = hi;
        hi *= 4.0;
        if hi > 1e300 {
            return Ok(hi);
        }
    }
    let mut x = initial_guess(y).clamp(lo, hi);
    for _ in 0..200 {
        let a = ratio_unchecked(x);
        let f = a - y;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = ratio_derivative(x, a);
        let mut next = x - f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 1e-15 * x.max(1e-300) || hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(x)
}

/// Classical piecewise approximation of the inverse ratio, used as the
/// Newton starting point.
fn initial_guess(y: f64) -> f64 {
    if y < 0.53 {
        2.0 * y + y.powi(3) + 5.0 * y.powi(5) / 6.0
    } else if y < 0.85 {
        -0.4 + 1.39 * y + 0.43 / (1.0 - y)
    } else {
        1.0 / (y.powi(3) - 4.0 * y * y + 3.0 * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_i0_small_values() {
        assert_eq!(log_bessel_i0(0.0).unwrap(), 0.0);
        // I0(2) = 2.2795853023360672674...
        let v = log_bessel_i0(2.0).unwrap();
        assert!((v - 2.279_585_302_336_067_f64.ln()).abs() < 1e-14, "{v}");
    }

    // (x, ln I0(x), I1(x)/I0(x)) from a 40-digit arbitrary-precision evaluation.
    const ORACLE: [(f64, f64, f64); 9] = [
        (0.5, 0.061549719185481303941, 0.24249961258080194535),
        (2.0, 0.82399354148295628293, 0.69777465796400798201),
        (10.0, 7.9429720831186955545, 0.94859982595484595897),
        (29.9, 27.286385310555095717, 0.98313283326580568592),
        (30.1, 27.483023208951181836, 0.98324589715371097574),
        (100.0, 96.779732689942583717, 0.99498737300516876559),
        (700.0, 695.80569999844344908, 0.99928545881842609327),
        (1e4, 9994.475903781432301, 0.99994999874987498046),
        (1e6, 999992.17330631281325, 0.99999949999987499987),
    ];

    #[test]
    fn matches_high_precision_oracle() {
        for &(x, log_i0, ratio) in &ORACLE {
            let l = log_bessel_i0(x).unwrap();
            let r = bessel_ratio(x).unwrap();
            assert!(((l - log_i0) / log_i0).abs() < 1e-12, "ln I0({x}) = {l}");
            assert!(((r - ratio) / ratio).abs() < 1e-12, "A({x}) = {r}");
        }
    }

    #[test]
    fn log_i0_large_argument_is_finite() {
        let v = log_bessel_i0(700.0).unwrap();
        let lead = 700.0 - 0.5 * (1400.0 * PI).ln();
        assert!(v.is_finite());
        assert!((v - lead).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(log_bessel_i0(-1.0).is_err());
        assert!(log_bessel_i0(f64::NAN).is_err());
        assert!(bessel_ratio(-0.5).is_err());
        assert!(inv_bessel_ratio(1.0).is_err());
        assert!(inv_bessel_ratio(-0.1).is_err());
    }

    #[test]
    fn ratio_reference_values() {
        assert_eq!(bessel_ratio(0.0).unwrap(), 0.0);
        // I1(2)/I0(2) = 1.5906368546373290634 / 2.2795853023360672674
        let r2 = bessel_ratio(2.0).unwrap();
        assert!((r2 - 1.590_636_854_637_329 / 2.279_585_302_336_067).abs() < 1e-14);
        let r50 = bessel_ratio(50.0).unwrap();
        assert!(r50 > 0.9899);
    }

    #[test]
    fn series_and_asymptotic_agree_at_cutoff() {
        let below = 0.5 * SERIES_CUTOFF * ascending_series(SERIES_CUTOFF, 1)
            / ascending_series(SERIES_CUTOFF, 0);
        let above = asymptotic_series(SERIES_CUTOFF, 1) / asymptotic_series(SERIES_CUTOFF, 0);
        assert!((below - above).abs() < 1e-14);
        let log_below = ascending_series(SERIES_CUTOFF, 0).ln();
        let log_above = SERIES_CUTOFF - 0.5 * (2.0 * PI * SERIES_CUTOFF).ln()
            + asymptotic_series(SERIES_CUTOFF, 0).ln();
        assert!((log_below - log_above).abs() < 1e-13);
    }

    #[test]
    fn higher_order_matches_recurrence() {
        // I_{p+1} = I_{p-1} - (2p/x) I_p
        for &x in &[0.3, 2.0, 7.5, 29.0, 45.0, 200.0] {
            let r1 = bessel_ratio_order(1, x).unwrap();
            let r2 = bessel_ratio_order(2, x).unwrap();
            let r3 = bessel_ratio_order(3, x).unwrap();
            assert!((r2 - (1.0 - 2.0 / x * r1)).abs() < 1e-12, "x={x}");
            assert!((r3 - (r1 - 4.0 / x * r2)).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut x = 1e-3;
        while x <= 1e3 {
            let y = bessel_ratio(x).unwrap();
            let back = inv_bessel_ratio(y).unwrap();
            assert!(((back - x) / x).abs() < 1e-9, "x={x} back={back}");
            x *= 1.37;
        }
    }

    #[test]
    fn inverse_handles_values_near_one() {
        let y = 1.0 - 1e-12;
        let x = inv_bessel_ratio(y).unwrap();
        assert!(x > 1e11);
        assert!(x.is_finite());
    }
}
