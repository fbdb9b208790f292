//! Discretized-phase forward-backward detector.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::ops::OpCounts;
use super::pmf::SymbolPmf;
use crate::error::{Error, Result};
use crate::modem::Constellation;

/// Kernel support in units of the increment standard deviation.
pub const KERNEL_SPAN_SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpBcjrParams {
    pub sigma2: f64,
    pub sigma_delta: f64,
    pub n_theta: usize,
}

#[derive(Debug, Clone)]
pub struct DpBcjrOutput {
    pub upward: Vec<SymbolPmf>,
    /// Normalized phase posteriors on the grid, when requested.
    pub posteriors: Option<Vec<Vec<f64>>>,
    /// Posterior circular mean per position.
    pub phase: Vec<f64>,
    pub ops: OpCounts,
}

/// Circular transition kernel on an `n`-point grid as `(offset, weight)`
/// pairs: a Gaussian of standard deviation `sigma_delta` sampled at grid
/// offsets within the kernel span, folded modulo `n` and normalized.
pub fn transition_kernel(n: usize, sigma_delta: f64) -> Vec<(usize, f64)> {
    let step = TAU / n as f64;
    if sigma_delta <= 0.0 {
        return vec![(0, 1.0)];
    }
    let span = (KERNEL_SPAN_SIGMAS * sigma_delta / step).floor() as i64;
    let mut folded = vec![0.0; n];
    for d in -span..=span {
        let x = d as f64 * step;
        folded[d.rem_euclid(n as i64) as usize] += (-0.5 * x * x / (sigma_delta * sigma_delta)).exp();
    }
    let total: f64 = folded.iter().sum();
    folded
        .into_iter()
        .enumerate()
        .filter(|&(_, w)| w > 0.0)
        .map(|(d, w)| (d, w / total))
        .collect()
}

/// `out[i] = sum_j w_j in[(i - d_j) mod n]`.
fn circular_convolve(input: &[f64], kernel: &[(usize, f64)], out: &mut [f64], ops: &mut OpCounts) {
    let n = input.len();
    out.fill(0.0);
    for &(d, w) in kernel {
        // out[i] += w * in[i - d]: split into the two contiguous runs
        let (head, tail) = out.split_at_mut(d);
        for (o, x) in tail.iter_mut().zip(&input[..n - d]) {
            *o += w * x;
        }
        for (o, x) in head.iter_mut().zip(&input[n - d..]) {
            *o += w * x;
        }
    }
    let taps = kernel.len() as u64;
    ops.tally(taps * n as u64, taps * n as u64, 0);
}

fn normalize(v: &mut [f64], ops: &mut OpCounts) -> f64 {
    let s: f64 = v.iter().sum();
    if s > 0.0 && s.is_finite() {
        let inv = 1.0 / s;
        v.iter_mut().for_each(|x| *x *= inv);
    }
    ops.tally(v.len() as u64, v.len() as u64, 0);
    s
}

struct Grid {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Grid {
    fn new(n: usize) -> Self {
        let (sin, cos) = (0..n).map(|i| (TAU * i as f64 / n as f64).sin_cos()).unzip();
        Self { cos, sin }
    }

    fn len(&self) -> usize {
        self.cos.len()
    }
}

/// Per-symbol log-likelihood terms `u_m(theta) = -|c_m|^2/(2 sigma2) + Re[z_m e^{-j theta}]`
/// with `z_m = r conj(c_m) / sigma2`; `|r|^2` is dropped as a common factor.
struct SymbolTerms {
    bias: Vec<f64>,
    z: Vec<Complex64>,
}

impl SymbolTerms {
    fn new(r: Complex64, constellation: &Constellation, sigma2: f64) -> Self {
        let inv = 1.0 / sigma2;
        let (bias, z) = constellation
            .points()
            .iter()
            .map(|c| (-0.5 * c.norm_sqr() * inv, r * c.conj() * inv))
            .unzip();
        Self { bias, z }
    }

    /// Mixture emission `sum_m prior_m exp(u_m)`, scaled by a per-symbol
    /// constant so that its maximum is close to one.
    fn emission(&self, prior: &SymbolPmf, grid: &Grid, out: &mut [f64], ops: &mut OpCounts) {
        out.fill(0.0);
        let active: Vec<(f64, Complex64)> = prior
            .probs()
            .iter()
            .zip(self.bias.iter().zip(&self.z))
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, (&b, &z))| (p.ln() + b, z))
            .collect();
        let top = active
            .iter()
            .map(|(a, z)| a + z.norm())
            .fold(f64::NEG_INFINITY, f64::max);
        for &(a, z) in &active {
            let a = a - top;
            for ((o, &c), &s) in out.iter_mut().zip(&grid.cos).zip(&grid.sin) {
                *o += (a + z.re * c + z.im * s).exp();
            }
        }
        let m = active.len() as u64;
        let n = grid.len() as u64;
        ops.tally(3 * m * n, 2 * m * n, m * n + m);
    }
}

/// Forward-backward recursion over the discretized phase.
///
/// `priors` are the symbol priors per position (indicator pmfs at pilots).
/// Upward messages exclude each position's own prior.
pub fn dp_bcjr(
    received: &[Complex64],
    priors: &[SymbolPmf],
    constellation: &Constellation,
    params: &DpBcjrParams,
    keep_posteriors: bool,
) -> Result<DpBcjrOutput> {
    let n = params.n_theta;
    if n < 2 {
        return Err(Error::invalid(format!("phase grid needs at least 2 points, got {n}")));
    }
    if !(params.sigma2 > 0.0) || !params.sigma2.is_finite() {
        return Err(Error::invalid(format!("sigma2 must be positive, got {}", params.sigma2)));
    }
    if priors.len() != received.len() {
        return Err(Error::LengthMismatch {
            what: "symbol priors",
            expected: received.len(),
            got: priors.len(),
        });
    }
    let k_len = received.len();
    let mut ops = OpCounts::default();
    let grid = Grid::new(n);
    let kernel = transition_kernel(n, params.sigma_delta);
    let terms: Vec<SymbolTerms> = received
        .iter()
        .map(|&r| SymbolTerms::new(r, constellation, params.sigma2))
        .collect();

    // Emissions, kept for the backward sweep.
    let mut emissions = vec![0.0; k_len * n];
    for (k, e) in emissions.chunks_exact_mut(n).enumerate() {
        terms[k].emission(&priors[k], &grid, e, &mut ops);
    }

    // alpha[k]: predictive density of theta_k given samples before k.
    let mut alpha = vec![0.0; k_len * n];
    let mut work = vec![0.0; n];
    if k_len > 0 {
        alpha[..n].fill(1.0 / n as f64);
    }
    for k in 0..k_len.saturating_sub(1) {
        let (cur, next) = alpha[k * n..(k + 2) * n].split_at_mut(n);
        combine(cur, &emissions[k * n..(k + 1) * n], &mut work, &mut ops);
        circular_convolve(&work, &kernel, next, &mut ops);
        normalize(next, &mut ops);
    }

    let mut upward = Vec::with_capacity(k_len);
    let mut phase = vec![0.0; k_len];
    let mut posteriors = keep_posteriors.then(|| vec![Vec::new(); k_len]);
    let mut beta = vec![1.0 / n as f64; n];
    let mut beta_next = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut post = vec![0.0; n];
    for k in (0..k_len).rev() {
        if k + 1 < k_len {
            combine(&beta_next, &emissions[(k + 1) * n..(k + 2) * n], &mut work, &mut ops);
            circular_convolve(&work, &kernel, &mut beta, &mut ops);
            normalize(&mut beta, &mut ops);
        }
        let a = &alpha[k * n..(k + 1) * n];
        for ((w, &x), &y) in weights.iter_mut().zip(a).zip(&beta) {
            *w = x * y;
        }
        ops.tally(0, n as u64, 0);
        normalize(&mut weights, &mut ops);

        upward.push(upward_message(&terms[k], &weights, &grid, &mut ops));

        for ((p, &w), &e) in post.iter_mut().zip(&weights).zip(&emissions[k * n..(k + 1) * n]) {
            *p = w * e;
        }
        normalize(&mut post, &mut ops);
        let mean: Complex64 = post
            .iter()
            .zip(grid.cos.iter().zip(&grid.sin))
            .map(|(&p, (&c, &s))| Complex64::new(p * c, p * s))
            .sum();
        phase[k] = mean.arg();
        if let Some(store) = posteriors.as_mut() {
            store[k] = post.clone();
        }
        std::mem::swap(&mut beta, &mut beta_next);
    }
    upward.reverse();
    Ok(DpBcjrOutput {
        upward,
        posteriors,
        phase,
        ops,
    })
}

/// `out = normalize(dist * emission)`. Falls back to the emission alone when
/// the product underflows everywhere.
fn combine(dist: &[f64], emission: &[f64], out: &mut [f64], ops: &mut OpCounts) {
    for ((o, &a), &e) in out.iter_mut().zip(dist).zip(emission) {
        *o = a * e;
    }
    ops.tally(0, dist.len() as u64, 0);
    let s = normalize(out, ops);
    if !(s > 0.0) {
        out.copy_from_slice(emission);
        normalize(out, ops);
    }
}

fn upward_message(terms: &SymbolTerms, weights: &[f64], grid: &Grid, ops: &mut OpCounts) -> SymbolPmf {
    let top = terms
        .bias
        .iter()
        .zip(&terms.z)
        .map(|(b, z)| b + z.norm())
        .fold(f64::NEG_INFINITY, f64::max);
    let probs: Vec<f64> = terms
        .bias
        .iter()
        .zip(&terms.z)
        .map(|(&b, &z)| {
            let a = b - top;
            weights
                .iter()
                .zip(grid.cos.iter().zip(&grid.sin))
                .map(|(&w, (&c, &s))| w * (a + z.re * c + z.im * s).exp())
                .sum()
        })
        .collect();
    let m = probs.len() as u64;
    let n = weights.len() as u64;
    ops.tally(3 * m * n, 3 * m * n, m * n);
    let total: f64 = probs.iter().sum();
    if total > 0.0 && total.is_finite() {
        SymbolPmf::from_probs(&probs)
    } else {
        SymbolPmf::uniform(probs.len())
    }
}
