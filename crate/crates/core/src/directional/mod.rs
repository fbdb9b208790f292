//! Directional statistics on the circle: Tikhonov (von Mises) densities in
//! the complex parametrization, mixtures of them, projection of a mixture
//! back onto a single Tikhonov density, and the Gaussian phase-diffusion step
//! applied between neighbouring phase samples.

mod bessel;
mod tikhonov;

pub use bessel::{bessel_ratio, bessel_ratio_order, inv_bessel_ratio, log_bessel_i0};
pub use tikhonov::{
    br_exp_approx, circular_moment, convolve_with_gaussian, inv_br_exp_approx, inv_br_piecewise,
    moment_match, tikhonov_log_pdf, BrMode, MixtureComponent, Projection, TikhonovMixture,
    TikhonovParam, INV_BR_BREAKPOINT,
};

pub(crate) use bessel::log_i0_unchecked;
