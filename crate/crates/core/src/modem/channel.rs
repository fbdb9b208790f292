use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// AWGN plus Wiener phase-noise channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Noise variance per real component.
    pub sigma2: f64,
    /// Standard deviation of the phase increment, radians.
    pub sigma_delta: f64,
}

impl ChannelParams {
    pub fn new(sigma2: f64, sigma_delta: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::invalid(format!("sigma2 must be positive, got {sigma2}")));
        }
        if !(sigma_delta >= 0.0) || !sigma_delta.is_finite() {
            return Err(Error::invalid(format!(
                "sigma_delta must be nonnegative, got {sigma_delta}"
            )));
        }
        Ok(Self { sigma2, sigma_delta })
    }

    pub fn var_delta(&self) -> f64 {
        self.sigma_delta * self.sigma_delta
    }
}

/// Wiener phase trajectory: uniform start, Gaussian increments, unwrapped.
pub fn generate_phase<R: Rng + ?Sized>(len: usize, sigma_delta: f64, rng: &mut R) -> Vec<f64> {
    let mut theta = Vec::with_capacity(len);
    if len == 0 {
        return theta;
    }
    let mut cur = rng.random::<f64>() * TAU;
    theta.push(cur);
    for _ in 1..len {
        let d: f64 = rng.sample(StandardNormal);
        cur += sigma_delta * d;
        theta.push(cur);
    }
    theta
}

/// `r_k = c_k e^{j theta_k} + n_k` with circular Gaussian `n_k` of variance `sigma2` per component.
pub fn apply_channel<R: Rng + ?Sized>(
    symbols: &[Complex64],
    phase: &[f64],
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if symbols.len() != phase.len() {
        return Err(Error::LengthMismatch {
            what: "symbols vs phase",
            expected: symbols.len(),
            got: phase.len(),
        });
    }
    let noise = Normal::new(0.0, sigma2.max(0.0).sqrt())
        .map_err(|e| Error::invalid(format!("noise distribution: {e}")))?;
    Ok(symbols
        .iter()
        .zip(phase)
        .map(|(&c, &t)| {
            c * Complex64::from_polar(1.0, t) + Complex64::new(noise.sample(rng), noise.sample(rng))
        })
        .collect())
}

/// Noise variance per component for a given Eb/N0, with unit symbol energy.
///
/// `payload_fraction` is the share of frame symbols carrying coded payload;
/// pilot overhead therefore raises the energy spent per information bit.
pub fn ebn0_to_sigma2(
    ebn0_db: f64,
    code_rate: f64,
    bits_per_symbol: usize,
    payload_fraction: f64,
) -> Result<f64> {
    if !ebn0_db.is_finite() {
        return Err(Error::invalid("Eb/N0 must be finite"));
    }
    if !(code_rate > 0.0 && code_rate <= 1.0) {
        return Err(Error::invalid(format!("code rate {code_rate} outside (0, 1]")));
    }
    if bits_per_symbol == 0 {
        return Err(Error::invalid("bits per symbol must be positive"));
    }
    if !(payload_fraction > 0.0 && payload_fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "payload fraction {payload_fraction} outside (0, 1]"
        )));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok(1.0 / (2.0 * ebn0 * code_rate * bits_per_symbol as f64 * payload_fraction))
}
