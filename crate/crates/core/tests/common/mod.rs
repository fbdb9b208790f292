//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use pnep_core::detector::SymbolPmf;
use pnep_core::directional::{log_bessel_i0, TikhonovMixture};
use pnep_core::modem::Constellation;

pub const QUAD_POINTS: usize = 4096;

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// First trigonometric moment of a normalized Tikhonov mixture by
/// rectangle-rule quadrature, evaluating each component density directly.
pub fn quadrature_moment(mix: &TikhonovMixture) -> Complex64 {
    let lw: Vec<f64> = mix.components.iter().map(|c| c.log_weight).collect();
    let lse = log_sum_exp(&lw);
    let comps: Vec<(f64, Complex64)> = mix
        .components
        .iter()
        .map(|c| {
            let z = c.param.z();
            (c.log_weight - lse - TAU.ln() - log_bessel_i0(z.norm()).unwrap(), z)
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for i in 0..QUAD_POINTS {
        let t = TAU * i as f64 / QUAD_POINTS as f64;
        let (s, c) = t.sin_cos();
        let dens: f64 = comps.iter().map(|(lw, z)| (lw + z.re * c + z.im * s).exp()).sum();
        mass += dens;
        acc += Complex64::from_polar(dens, t);
    }
    acc / mass
}

/// Dense discrete-HMM forward-backward in the log domain. Returns
/// normalized log posteriors of the grid phase at every position.
pub fn hmm_log_posteriors(
    received: &[Complex64],
    priors: &[SymbolPmf],
    constellation: &Constellation,
    sigma2: f64,
    sigma_delta: f64,
    n: usize,
) -> Vec<Vec<f64>> {
    let step = TAU / n as f64;
    // log transition matrix: trans[i][j] = log P(theta_{k+1} = j | theta_k = i)
    let mut trans = vec![vec![f64::NEG_INFINITY; n]; n];
    for (i, row) in trans.iter_mut().enumerate() {
        let mut w = vec![0.0; n];
        if sigma_delta == 0.0 {
            w[i] = 1.0;
        } else {
            let reach = (5.0 * sigma_delta / step).floor() as i64;
            for d in -reach..=reach {
                let j = (i as i64 + d).rem_euclid(n as i64) as usize;
                let x = d as f64 * step;
                w[j] += (-(x * x) / (2.0 * sigma_delta * sigma_delta)).exp();
            }
        }
        let s: f64 = w.iter().sum();
        for (r, x) in row.iter_mut().zip(w) {
            *r = (x / s).ln();
        }
    }
    let k_len = received.len();
    let log_emit: Vec<Vec<f64>> = (0..k_len)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let rot = Complex64::from_polar(1.0, step * i as f64);
                    let terms: Vec<f64> = constellation
                        .points()
                        .iter()
                        .zip(priors[k].probs())
                        .map(|(c, &p)| p.ln() - (received[k] - c * rot).norm_sqr() / (2.0 * sigma2))
                        .collect();
                    log_sum_exp(&terms)
                })
                .collect()
        })
        .collect();
    let mut fwd = vec![vec![0.0; n]; k_len];
    fwd[0] = vec![-(n as f64).ln(); n];
    for k in 1..k_len {
        for j in 0..n {
            let terms: Vec<f64> = (0..n).map(|i| fwd[k - 1][i] + log_emit[k - 1][i] + trans[i][j]).collect();
            fwd[k][j] = log_sum_exp(&terms);
        }
    }
    let mut bwd = vec![vec![0.0; n]; k_len];
    for k in (0..k_len.saturating_sub(1)).rev() {
        for i in 0..n {
            let terms: Vec<f64> = (0..n).map(|j| trans[i][j] + log_emit[k + 1][j] + bwd[k + 1][j]).collect();
            bwd[k][i] = log_sum_exp(&terms);
        }
    }
    (0..k_len)
        .map(|k| {
            let joint: Vec<f64> = (0..n).map(|i| fwd[k][i] + log_emit[k][i] + bwd[k][i]).collect();
            let z = log_sum_exp(&joint);
            joint.into_iter().map(|x| x - z).collect()
        })
        .collect()
}

/// Parity-check matrix of the (7,4) Hamming code, row-major.
pub const HAMMING_H: [u8; 21] = [
    1, 0, 1, 0, 1, 0, 1, //
    0, 1, 1, 0, 0, 1, 1, //
    0, 0, 0, 1, 1, 1, 1,
];

/// Bitwise MAP decisions by enumerating all codewords.
pub fn exhaustive_map_bits(codewords: &[Vec<u8>], llr: &[f64]) -> Vec<u8> {
    let n = llr.len();
    // log P(y | c) up to a constant: sum over bits of -llr/2 for ones, +llr/2 for zeros
    let scores: Vec<f64> = codewords
        .iter()
        .map(|c| c.iter().zip(llr).map(|(&b, &l)| if b == 0 { 0.5 * l } else { -0.5 * l }).sum())
        .collect();
    (0..n)
        .map(|i| {
            let zero: Vec<f64> = codewords.iter().zip(&scores).filter(|(c, _)| c[i] == 0).map(|(_, &s)| s).collect();
            let one: Vec<f64> = codewords.iter().zip(&scores).filter(|(c, _)| c[i] == 1).map(|(_, &s)| s).collect();
            u8::from(log_sum_exp(&one) > log_sum_exp(&zero))
        })
        .collect()
}

/// A short distributed-pilot link for fast end-to-end tests.
pub fn small_run_config(variant: pnep_core::detector::DetectorVariant) -> pnep_core::simkit::RunConfig {
    use pnep_core::simkit::{CodeSource, StopRule};
    let mut cfg = pnep_core::ScenarioPreset::Fig3Distributed.config().with_variant(variant);
    cfg.name = "small".into();
    cfg.scenario.code = CodeSource::Regular {
        n: 400,
        col_deg: 3,
        row_deg: 6,
        seed: 5,
    };
    cfg.ebn0_db = vec![4.0];
    cfg.stop = StopRule {
        min_frame_errors: 5,
        max_frames: 24,
    };
    cfg
}
