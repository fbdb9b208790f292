use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::bessel::{
    bessel_ratio_order, inv_bessel_ratio, log_i0_unchecked, ratio_unchecked,
};
use crate::error::{Error, Result};

/// Largest first-moment magnitude handed to an inverse Bessel-ratio map.
const MOMENT_CLAMP: f64 = 1.0 - 1e-12;

/// Complex parameter of a Tikhonov density `exp(Re[z e^{-j theta}]) / (2 pi I0(|z|))`.
///
/// `arg z` is the circular mean and `|z|` the precision; `z = 0` is the
/// uniform density.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TikhonovParam(pub Complex64);

impl TikhonovParam {
    pub const UNIFORM: TikhonovParam = TikhonovParam(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn from_polar(precision: f64, mean: f64) -> Self {
        Self(Complex64::from_polar(precision, mean))
    }

    #[inline]
    pub fn z(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn precision(self) -> f64 {
        self.0.norm()
    }

    #[inline]
    pub fn mean(self) -> f64 {
        self.0.arg()
    }

    pub fn is_uniform(self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    /// `1 - I1(|z|)/I0(|z|)`.
    pub fn circular_variance(self) -> f64 {
        1.0 - ratio_unchecked(self.precision())
    }
}

impl From<Complex64> for TikhonovParam {
    fn from(z: Complex64) -> Self {
        Self(z)
    }
}

impl Add for TikhonovParam {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl AddAssign for TikhonovParam {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Sub for TikhonovParam {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul<f64> for TikhonovParam {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * rhs)
    }
}

/// How the Bessel ratio and its inverse enter a moment-matching projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BrMode {
    /// True `I1/I0` on both sides, numeric inversion.
    Exact,
    /// `exp(-0.5/x)` on both sides, closed-form inversion.
    ExpApprox,
    /// Ratio replaced by its argument: the projection becomes a weighted sum of parameters.
    Identity,
    /// True ratio on the mixture side, parabola/exponential inverse on the result side.
    PiecewiseInverse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub log_weight: f64,
    pub param: TikhonovParam,
}

/// Weighted Tikhonov mixture with log-domain weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TikhonovMixture {
    pub components: SmallVec<[MixtureComponent; 16]>,
}

impl TikhonovMixture {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, log_weight: f64, param: TikhonovParam) {
        self.components.push(MixtureComponent { log_weight, param });
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn log_normalizer(&self) -> f64 {
        let max = self
            .components
            .iter()
            .map(|c| c.log_weight)
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return max;
        }
        let s: f64 = self
            .components
            .iter()
            .map(|c| (c.log_weight - max).exp())
            .sum();
        max + s.ln()
    }

    /// Shift log-weights so that the linear weights sum to one.
    pub fn normalize(&mut self) {
        let lse = self.log_normalizer();
        if lse.is_finite() {
            for c in &mut self.components {
                c.log_weight -= lse;
            }
        }
    }

    /// Normalized linear weights.
    pub fn weights(&self) -> SmallVec<[f64; 16]> {
        let lse = self.log_normalizer();
        self.components
            .iter()
            .map(|c| (c.log_weight - lse).exp())
            .collect()
    }

    /// Log-density of the (normalized) mixture at `theta`.
    pub fn log_pdf(&self, theta: f64) -> f64 {
        let lse = self.log_normalizer();
        let terms: SmallVec<[f64; 16]> = self
            .components
            .iter()
            .map(|c| c.log_weight - lse + tikhonov_log_pdf(theta, c.param))
            .collect();
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
    }
}

/// `ln t(theta; z) = Re[z e^{-j theta}] - ln(2 pi) - ln I0(|z|)`.
pub fn tikhonov_log_pdf(theta: f64, z: TikhonovParam) -> f64 {
    let rot = Complex64::from_polar(1.0, -theta);
    (z.0 * rot).re - (2.0 * PI).ln() - log_i0_unchecked(z.precision())
}

/// `p`-th trigonometric moment `E[e^{j p theta}]` of a Tikhonov density.
pub fn circular_moment(z: TikhonovParam, p: u32) -> Result<Complex64> {
    if p == 0 {
        return Err(Error::invalid("trigonometric moment order must be >= 1"));
    }
    let r = z.precision();
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mag = bessel_ratio_order(p, r)?;
    Ok(Complex64::from_polar(mag, p as f64 * z.mean()))
}

/// `exp(-0.5/x)`, the exponential stand-in for `I1(x)/I0(x)`; 0 at `x = 0`.
pub fn br_exp_approx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-0.5 / x).exp()
    }
}

/// Exact inverse of [`br_exp_approx`]: `-0.5/ln(y)`.
pub fn inv_br_exp_approx(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y >= 1.0 {
        f64::INFINITY
    } else {
        -0.5 / y.ln()
    }
}

/// Breakpoint between the parabolic and exponential branches of [`inv_br_piecewise`].
///
/// The two branches do not meet here: the parabola gives about 1.5038 and
/// the exponential branch about 1.4977. The breakpoint belongs to the parabola.
pub const INV_BR_BREAKPOINT: f64 = 0.59;

/// Piecewise approximation of the inverse Bessel ratio: a parabola for small
/// ratios, an offset exponential inverse above [`INV_BR_BREAKPOINT`].
/// Negative outputs are clamped to zero.
pub fn inv_br_piecewise(br: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&br) {
        return Err(Error::Domain {
            func: "inv_br_piecewise",
            value: br,
        });
    }
    let x = if br <= INV_BR_BREAKPOINT {
        2.55 - 3.02 * (0.71 - br).sqrt()
    } else {
        -0.5 / br.ln() + 0.55
    };
    Ok(x.max(0.0))
}

/// Result of a moment-matching projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub param: TikhonovParam,
    /// The matched first-moment magnitude reached 1 and was clamped before inversion.
    pub clamped: bool,
}

#[inline]
fn forward_map(mode: BrMode, x: f64) -> f64 {
    match mode {
        BrMode::Exact | BrMode::PiecewiseInverse => ratio_unchecked(x),
        BrMode::ExpApprox => br_exp_approx(x),
        BrMode::Identity => x,
    }
}

/// Project a Tikhonov mixture onto a single Tikhonov density by matching the
/// (mode-mapped) first trigonometric moment.
pub fn moment_match(mix: &TikhonovMixture, mode: BrMode) -> Result<Projection> {
    if mix.is_empty() {
        return Err(Error::EmptyMixture);
    }
    let weights = mix.weights();
    let mut m = Complex64::new(0.0, 0.0);
    for (w, c) in weights.iter().zip(mix.components.iter()) {
        let r = c.param.precision();
        if r == 0.0 || *w == 0.0 {
            continue;
        }
        let g = forward_map(mode, r);
        m += c.param.0 * (w * g / r);
    }
    let mag = m.norm();
    if mag == 0.0 {
        return Ok(Projection {
            param: TikhonovParam::UNIFORM,
            clamped: false,
        });
    }
    let mut clamped = false;
    let precision = match mode {
        BrMode::Identity => mag,
        BrMode::ExpApprox => inv_br_exp_approx(mag),
        BrMode::Exact | BrMode::PiecewiseInverse => {
            let y = if mag >= MOMENT_CLAMP {
                clamped = true;
                MOMENT_CLAMP
            } else {
                mag
            };
            if mode == BrMode::Exact {
                inv_bessel_ratio(y)?
            } else {
                inv_br_piecewise(y)?
            }
        }
    };
    Ok(Projection {
        param: TikhonovParam(m * (precision / mag)),
        clamped,
    })
}

/// Tikhonov approximation of a Tikhonov density convolved with a zero-mean
/// Gaussian of variance `var_delta`: `z / (1 + var_delta |z|)`.
pub fn convolve_with_gaussian(z: TikhonovParam, var_delta: f64) -> TikhonovParam {
    if var_delta <= 0.0 {
        return z;
    }
    TikhonovParam(z.0 / (1.0 + var_delta * z.precision()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_log_pdf() {
        for &t in &[0.0, 1.0, -2.5, 6.0] {
            assert!((tikhonov_log_pdf(t, TikhonovParam::UNIFORM) + (2.0 * PI).ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_approx_values() {
        assert!((br_exp_approx(0.5) - (-1.0_f64).exp()).abs() < 1e-15);
        assert_eq!(br_exp_approx(0.0), 0.0);
        assert!((br_exp_approx(1e300) - 1.0).abs() < 1e-15);
        assert!((br_exp_approx(2.0) - 0.778_800_783_071_404_9).abs() < 1e-12);
        let y = br_exp_approx(3.7);
        assert!((inv_br_exp_approx(y) - 3.7).abs() < 1e-12);
    }

    #[test]
    fn piecewise_inverse_branches() {
        let at0 = inv_br_piecewise(0.0).unwrap();
        assert!((at0 - (2.55 - 3.02 * 0.71_f64.sqrt())).abs() < 1e-15);
        assert!(at0 < 0.01);
        let left = inv_br_piecewise(0.59).unwrap();
        assert!((left - (2.55 - 3.02 * 0.12_f64.sqrt())).abs() < 1e-15);
        let right = inv_br_piecewise(0.59 + 1e-12).unwrap();
        assert!((left - right - 0.0061).abs() < 5e-4, "jump {}", left - right);
        assert!(inv_br_piecewise(1.0).is_err());
        assert!(inv_br_piecewise(-0.01).is_err());
    }

    #[test]
    fn single_component_projection_is_identity() {
        let z = TikhonovParam::from_polar(3.3, 0.7);
        let mut mix = TikhonovMixture::new();
        mix.push(-1.2, z);
        let exact = moment_match(&mix, BrMode::Exact).unwrap().param;
        assert!((exact.0 - z.0).norm() < 1e-10);
        assert_eq!(moment_match(&mix, BrMode::Identity).unwrap().param, z);
        let exp = moment_match(&mix, BrMode::ExpApprox).unwrap().param;
        assert!((exp.0 - z.0).norm() < 1e-12);
    }

    #[test]
    fn symmetric_pair_projects_to_zero_angle() {
        let mut mix = TikhonovMixture::new();
        mix.push(0.0, TikhonovParam::from_polar(5.0, 0.4));
        mix.push(0.0, TikhonovParam::from_polar(5.0, -0.4));
        for mode in [BrMode::Exact, BrMode::ExpApprox, BrMode::Identity, BrMode::PiecewiseInverse] {
            let p = moment_match(&mix, mode).unwrap().param;
            assert!(p.mean().abs() < 1e-15, "{mode:?}");
        }
    }

    #[test]
    fn empty_mixture_is_an_error() {
        assert!(matches!(
            moment_match(&TikhonovMixture::new(), BrMode::Exact),
            Err(Error::EmptyMixture)
        ));
    }

    #[test]
    fn clamps_saturated_moment() {
        let mut mix = TikhonovMixture::new();
        mix.push(0.0, TikhonovParam::new(1e15, 0.0));
        let p = moment_match(&mix, BrMode::PiecewiseInverse).unwrap();
        assert!(p.clamped);
        assert!(p.param.precision().is_finite());
    }

    #[test]
    fn convolution_reference() {
        let z = TikhonovParam::new(10.0, 0.0);
        assert_eq!(convolve_with_gaussian(z, 0.0), z);
        let var = (6.0_f64.to_radians()).powi(2);
        let out = convolve_with_gaussian(z, var);
        assert!((out.0.re - 10.0 / (1.0 + 10.0 * var)).abs() < 1e-12);
        assert!((out.0.re - 9.0118).abs() < 1e-3);
        assert_eq!(out.0.im, 0.0);
    }

    #[test]
    fn circular_moment_basics() {
        assert_eq!(circular_moment(TikhonovParam::UNIFORM, 1).unwrap(), Complex64::new(0.0, 0.0));
        let z = TikhonovParam::from_polar(2.0, PI / 4.0);
        let m = circular_moment(z, 1).unwrap();
        assert!((m.norm() - 0.697_774_657_964_007_9).abs() < 1e-12);
        assert!((m.arg() - PI / 4.0).abs() < 1e-15);
        assert!(circular_moment(z, 0).is_err());
    }

    #[test]
    fn mixture_normalization() {
        let mut mix = TikhonovMixture::new();
        mix.push(800.0, TikhonovParam::new(1.0, 0.0));
        mix.push(801.0, TikhonovParam::new(0.0, 1.0));
        mix.push(-5.0, TikhonovParam::new(0.0, -1.0));
        mix.normalize();
        let s: f64 = mix.components.iter().map(|c| c.log_weight.exp()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
