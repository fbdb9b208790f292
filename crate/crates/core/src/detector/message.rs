//! Per-symbol message computations of the phase detector.

use std::f64::consts::PI;

use num_complex::Complex64;
use smallvec::SmallVec;

use super::config::RejectionRule;
use super::ops::OpCounts;
use super::pmf::SymbolPmf;
use crate::directional::{
    log_i0_unchecked, moment_match, BrMode, TikhonovMixture, TikhonovParam,
};
use crate::error::{Error, Result};
use crate::modem::Constellation;

/// Prior precision at or below which rejection is never triggered.
pub const REJECTION_MIN_PRIOR: f64 = 1e-6;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::invalid(format!("sigma2 must be positive, got {sigma2}")));
    }
    Ok(())
}

/// Tikhonov mixture describing the phase information carried by one
/// received sample under the symbol prior `prior`. Zero-probability symbols
/// contribute no component.
pub fn observation_mixture(
    r: Complex64,
    prior: &SymbolPmf,
    constellation: &Constellation,
    sigma2: f64,
) -> Result<TikhonovMixture> {
    check_sigma2(sigma2)?;
    Ok(observation_mixture_counted(r, prior, constellation, sigma2, &mut OpCounts::default()))
}

pub(crate) fn observation_mixture_counted(
    r: Complex64,
    prior: &SymbolPmf,
    constellation: &Constellation,
    sigma2: f64,
    ops: &mut OpCounts,
) -> TikhonovMixture {
    let inv = 1.0 / sigma2;
    let half_inv = 0.5 * inv;
    let mut mix = TikhonovMixture::new();
    for (c, &p) in constellation.points().iter().zip(prior.probs()) {
        if p <= 0.0 {
            continue;
        }
        let z = r * c.conj() * inv;
        let log_w = p.ln() - c.norm_sqr() * half_inv + LN_2PI + log_i0_unchecked(z.norm());
        mix.push(log_w, TikhonovParam(z));
        // complex product and scaling, magnitude, weight terms
        ops.tally(5, 9, 3);
    }
    count_normalization(mix.len() as u64, ops);
    mix.normalize();
    mix
}

fn count_normalization(m: u64, ops: &mut OpCounts) {
    // max search, exponentials, sum, log, shift
    ops.tally(3 * m, 0, m + 1);
}

fn count_projection(m: u64, ops: &mut OpCounts) {
    // per component: forward map, weight scaling, accumulation;
    // then magnitude, inverse map and rescaling
    ops.tally(2 * m + 1, 5 * m + 5, m + 2);
}

/// Moment-matching projection of an observation mixture, with no prior.
/// A single-component mixture is already Tikhonov and is returned as is.
pub fn tp_project(mix: &TikhonovMixture, mode: BrMode) -> Result<TikhonovParam> {
    if mix.len() == 1 {
        return Ok(mix.components[0].param);
    }
    Ok(moment_match(mix, mode)?.param)
}

pub(crate) fn tp_project_counted(
    mix: &TikhonovMixture,
    mode: BrMode,
    ops: &mut OpCounts,
) -> Result<TikhonovParam> {
    count_projection(mix.len() as u64, ops);
    tp_project(mix, mode)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpOutcome {
    pub z_marginal: TikhonovParam,
    pub z_d: TikhonovParam,
    pub rejected: bool,
}

/// Mixture of `p_d * p_u` with `p_u = t(.; z_u)`: every component parameter
/// is shifted by `z_u` and its weight rescaled by the new normalizer.
pub fn shifted_mixture(mix: &TikhonovMixture, z_u: TikhonovParam) -> TikhonovMixture {
    if z_u.is_uniform() {
        return mix.clone();
    }
    let mut out = TikhonovMixture::new();
    for c in &mix.components {
        let z = c.param + z_u;
        let log_w = c.log_weight - log_i0_unchecked(c.param.precision())
            + log_i0_unchecked(z.precision());
        out.push(log_w, z);
    }
    out
}

/// Expectation-propagation update: project the product of the observation
/// mixture and the prior `t(.; z_u)`, then divide the prior back out.
///
/// Single-component mixtures are closed under the product, so no projection
/// is applied to them. `rules` are evaluated only when nonempty.
pub fn ep_project(
    mix: &TikhonovMixture,
    z_u: TikhonovParam,
    mode: BrMode,
    rules: &[RejectionRule],
) -> Result<EpOutcome> {
    ep_project_counted(mix, z_u, mode, rules, &mut OpCounts::default())
}

pub(crate) fn ep_project_counted(
    mix: &TikhonovMixture,
    z_u: TikhonovParam,
    mode: BrMode,
    rules: &[RejectionRule],
    ops: &mut OpCounts,
) -> Result<EpOutcome> {
    if mix.is_empty() {
        return Err(Error::EmptyMixture);
    }
    let m = mix.len() as u64;
    let shifted = shifted_mixture(mix, z_u);
    // shift, new magnitude, two log-Bessel evaluations
    ops.tally(4 * m, 2 * m, 3 * m);

    if mix.len() == 1 {
        let z_d = mix.components[0].param;
        return Ok(EpOutcome {
            z_marginal: z_u + z_d,
            z_d,
            rejected: false,
        });
    }

    if !rules.is_empty() {
        let params: SmallVec<[TikhonovParam; 16]> =
            shifted.components.iter().map(|c| c.param).collect();
        ops.tally((2 + rules.len() as u64) * m, 4 * m, m);
        if rejection_check(&params, z_u, rules) {
            return Ok(EpOutcome {
                z_marginal: z_u,
                z_d: TikhonovParam::UNIFORM,
                rejected: true,
            });
        }
    }

    count_normalization(m, ops);
    count_projection(m, ops);
    let projected = moment_match(&shifted, mode)?.param;
    ops.tally(4, 0, 0);
    let z_d = projected - z_u;
    Ok(EpOutcome {
        z_marginal: z_u + z_d,
        z_d,
        rejected: false,
    })
}

/// True when, for some rule, more than `max_inconsistent` shifted mixture
/// modes lie farther than `threshold` from the prior mean. Never fires when
/// the prior is (nearly) uniform.
pub fn rejection_check(
    shifted_params: &[TikhonovParam],
    z_u: TikhonovParam,
    rules: &[RejectionRule],
) -> bool {
    if z_u.precision() <= REJECTION_MIN_PRIOR {
        return false;
    }
    let ref_conj = z_u.z().conj();
    let gammas: SmallVec<[f64; 16]> = shifted_params
        .iter()
        .map(|p| wrap_angle((p.z() * ref_conj).arg()).abs())
        .collect();
    rules.iter().any(|rule| {
        gammas.iter().filter(|&&g| g > rule.threshold).count() > rule.max_inconsistent
    })
}

/// Map an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Convex combination `xi * z_new + (1 - xi) * z_prev`.
pub fn damp(z_new: TikhonovParam, z_prev: TikhonovParam, xi: f64) -> TikhonovParam {
    if xi == 1.0 {
        return z_new;
    }
    if xi == 0.0 {
        return z_prev;
    }
    z_new * xi + z_prev * (1.0 - xi)
}

/// Symbol probabilities implied by a received sample and a Tikhonov phase
/// prior, `P(c) ~ exp(-|c|^2 / 2 sigma2) I0(|z_u + r conj(c) / sigma2|)`.
pub fn upward_symbol_message(
    r: Complex64,
    z_u: TikhonovParam,
    constellation: &Constellation,
    sigma2: f64,
) -> SymbolPmf {
    upward_symbol_message_counted(r, z_u, constellation, sigma2, &mut OpCounts::default())
}

pub(crate) fn upward_symbol_message_counted(
    r: Complex64,
    z_u: TikhonovParam,
    constellation: &Constellation,
    sigma2: f64,
    ops: &mut OpCounts,
) -> SymbolPmf {
    let inv = 1.0 / sigma2;
    let half_inv = 0.5 * inv;
    let logs: SmallVec<[f64; 16]> = constellation
        .points()
        .iter()
        .map(|c| {
            let z = z_u.z() + r * c.conj() * inv;
            -c.norm_sqr() * half_inv + log_i0_unchecked(z.norm())
        })
        .collect();
    let m = logs.len() as u64;
    ops.tally(5 * m, 9 * m, 2 * m);
    count_normalization(m, ops);
    SymbolPmf::from_log(&logs)
}
