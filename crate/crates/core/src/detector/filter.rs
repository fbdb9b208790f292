//! Forward/backward filtering along the phase Markov chain.

use num_complex::Complex64;

use super::config::{DetectorConfig, DetectorVariant, SymbolRejection};
use super::dpbcjr::{dp_bcjr, DpBcjrParams};
use super::message::{
    damp, ep_project_counted, observation_mixture_counted, tp_project_counted,
    upward_symbol_message_counted, wrap_angle,
};
use super::ops::OpCounts;
use super::pmf::SymbolPmf;
use crate::directional::{convolve_with_gaussian, TikhonovMixture, TikhonovParam};
use crate::error::{Error, Result};
use crate::modem::Constellation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Per-frame detector inputs.
#[derive(Debug, Clone, Copy)]
pub struct DetectorInput<'a> {
    pub received: &'a [Complex64],
    /// Symbol priors per position; pilots carry an indicator pmf.
    pub priors: &'a [SymbolPmf],
    pub pilot_mask: &'a [bool],
    /// Optional per-position override of the configured rejection rules.
    pub rejection: Option<&'a [SymbolRejection]>,
}

impl DetectorInput<'_> {
    fn validate(&self, m: usize) -> Result<()> {
        let k = self.received.len();
        for (what, got) in [
            ("symbol priors", self.priors.len()),
            ("pilot mask", self.pilot_mask.len()),
            ("rejection overrides", self.rejection.map_or(k, <[_]>::len)),
        ] {
            if got != k {
                return Err(Error::LengthMismatch {
                    what,
                    expected: k,
                    got,
                });
            }
        }
        if let Some(p) = self.priors.iter().find(|p| p.len() != m) {
            return Err(Error::LengthMismatch {
                what: "symbol prior alphabet",
                expected: m,
                got: p.len(),
            });
        }
        Ok(())
    }
}

/// Per-frame filter state. Observation messages are kept separately for
/// each direction since each pass sees a different prior.
#[derive(Debug, Clone)]
pub struct DetectorState {
    pub z_f: Vec<TikhonovParam>,
    pub z_b: Vec<TikhonovParam>,
    pub z_d_fwd: Vec<TikhonovParam>,
    pub z_d_bwd: Vec<TikhonovParam>,
    /// Whether the most recent pass rejected the observation at each position.
    pub rejected: Vec<bool>,
    pub rejections: usize,
    pub ops: OpCounts,
}

impl DetectorState {
    pub fn new(len: usize) -> Self {
        let zero = vec![TikhonovParam::UNIFORM; len];
        Self {
            z_f: zero.clone(),
            z_b: zero.clone(),
            z_d_fwd: zero.clone(),
            z_d_bwd: zero,
            rejected: vec![false; len],
            rejections: 0,
            ops: OpCounts::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.z_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_f.is_empty()
    }
}

/// Frame data shared by all passes of one detector run.
pub struct PassData<'a> {
    pub input: DetectorInput<'a>,
    pub mixtures: &'a [TikhonovMixture],
    /// Projected observations, used by the TP variant only.
    pub tp: &'a [TikhonovParam],
    pub var_delta: f64,
}

/// One directional pass. `opposite_prev` is the opposite-direction message
/// array from the previous inner iteration, or `None` on the first one.
pub fn filter_pass(
    state: &mut DetectorState,
    data: &PassData<'_>,
    cfg: &DetectorConfig,
    direction: Direction,
    opposite_prev: Option<&[TikhonovParam]>,
) -> Result<()> {
    let k_len = state.len();
    if k_len == 0 {
        return Ok(());
    }
    let config_rules = cfg.rules();
    let order: Box<dyn Iterator<Item = usize>> = match direction {
        Direction::Forward => Box::new(0..k_len),
        Direction::Backward => Box::new((0..k_len).rev()),
    };
    match direction {
        Direction::Forward => state.z_f[0] = TikhonovParam::UNIFORM,
        Direction::Backward => state.z_b[k_len - 1] = TikhonovParam::UNIFORM,
    }
    for k in order {
        let own = match direction {
            Direction::Forward => state.z_f[k],
            Direction::Backward => state.z_b[k],
        };
        let z_u = match opposite_prev {
            Some(opp) => {
                state.ops.tally(2, 0, 0);
                own + opp[k]
            }
            None => own,
        };
        let prev_d = match direction {
            Direction::Forward => state.z_d_fwd[k],
            Direction::Backward => state.z_d_bwd[k],
        };
        let pilot = data.input.pilot_mask[k];
        let mut rejected = false;
        let z_d = if cfg.variant == DetectorVariant::Tp {
            damp_counted(data.tp[k], prev_d, cfg.damping, pilot, &mut state.ops)
        } else {
            let rules = match data.input.rejection.map(|r| &r[k]) {
                _ if pilot => &[][..],
                None | Some(SymbolRejection::Config) => &config_rules[..],
                Some(SymbolRejection::Custom(r)) => &r[..],
                Some(SymbolRejection::Off) => &[][..],
            };
            let out = ep_project_counted(&data.mixtures[k], z_u, cfg.br_mode, rules, &mut state.ops)?;
            if out.rejected {
                rejected = true;
                state.rejections += 1;
                TikhonovParam::UNIFORM
            } else {
                damp_counted(out.z_d, prev_d, cfg.damping, pilot, &mut state.ops)
            }
        };
        state.rejected[k] = rejected;
        // combine with own message, then diffuse to the neighbour
        state.ops.tally(4, 5, 1);
        match direction {
            Direction::Forward => {
                state.z_d_fwd[k] = z_d;
                if k + 1 < k_len {
                    state.z_f[k + 1] = convolve_with_gaussian(own + z_d, data.var_delta);
                }
            }
            Direction::Backward => {
                state.z_d_bwd[k] = z_d;
                if k > 0 {
                    state.z_b[k - 1] = convolve_with_gaussian(own + z_d, data.var_delta);
                }
            }
        }
    }
    Ok(())
}

fn damp_counted(
    z_new: TikhonovParam,
    z_prev: TikhonovParam,
    xi: f64,
    pilot: bool,
    ops: &mut OpCounts,
) -> TikhonovParam {
    if pilot || xi == 1.0 {
        return z_new;
    }
    ops.tally(3, 4, 0);
    damp(z_new, z_prev, xi)
}

#[derive(Debug, Clone)]
pub struct DetectorOutput {
    /// Upward symbol pmfs, one per position (pilots included).
    pub upward: Vec<SymbolPmf>,
    /// Phase estimate per position, radians.
    pub phase: Vec<f64>,
    pub rejections: usize,
    pub ops: OpCounts,
    /// Number of symbol updates the counters cover (positions x inner iterations).
    pub symbol_updates: u64,
}

/// Phase detector bound to a constellation and channel parameters.
#[derive(Debug, Clone)]
pub struct PhaseDetector<'a> {
    pub cfg: &'a DetectorConfig,
    pub constellation: &'a Constellation,
    pub sigma2: f64,
    pub sigma_delta: f64,
}

impl PhaseDetector<'_> {
    /// Run `n_inner` forward/backward iterations and produce upward messages.
    pub fn run(&self, input: DetectorInput<'_>, n_inner: usize) -> Result<DetectorOutput> {
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::invalid(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if n_inner == 0 {
            return Err(Error::invalid("at least one inner detector iteration is required"));
        }
        input.validate(self.constellation.size())?;
        if self.cfg.variant == DetectorVariant::DpBcjr {
            let params = DpBcjrParams {
                sigma2: self.sigma2,
                sigma_delta: self.sigma_delta,
                n_theta: self.cfg.n_theta,
            };
            let out = dp_bcjr(input.received, input.priors, self.constellation, &params, false)?;
            let k = input.received.len() as u64;
            return Ok(DetectorOutput {
                upward: out.upward,
                phase: out.phase,
                rejections: 0,
                ops: out.ops,
                symbol_updates: k,
            });
        }

        let k_len = input.received.len();
        let mut ops = OpCounts::default();
        let mixtures: Vec<TikhonovMixture> = input
            .received
            .iter()
            .zip(input.priors)
            .map(|(&r, p)| observation_mixture_counted(r, p, self.constellation, self.sigma2, &mut ops))
            .collect();
        let tp: Vec<TikhonovParam> = if self.cfg.variant == DetectorVariant::Tp {
            mixtures
                .iter()
                .map(|m| tp_project_counted(m, self.cfg.br_mode, &mut ops))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let data = PassData {
            input,
            mixtures: &mixtures,
            tp: &tp,
            var_delta: self.sigma_delta * self.sigma_delta,
        };
        let mut state = DetectorState::new(k_len);
        state.ops = ops;
        for n in 0..n_inner {
            let (f_prev, b_prev) = if n == 0 {
                (None, None)
            } else {
                (Some(state.z_f.clone()), Some(state.z_b.clone()))
            };
            filter_pass(&mut state, &data, self.cfg, Direction::Forward, b_prev.as_deref())?;
            filter_pass(&mut state, &data, self.cfg, Direction::Backward, f_prev.as_deref())?;
        }

        let mut upward = Vec::with_capacity(k_len);
        let mut phase = Vec::with_capacity(k_len);
        for k in 0..k_len {
            let z_u = state.z_f[k] + state.z_b[k];
            state.ops.tally(2, 0, 0);
            upward.push(if input.pilot_mask[k] {
                input.priors[k].clone()
            } else {
                upward_symbol_message_counted(
                    input.received[k],
                    z_u,
                    self.constellation,
                    self.sigma2,
                    &mut state.ops,
                )
            });
            let obs = (state.z_d_fwd[k] + state.z_d_bwd[k]) * 0.5;
            phase.push((z_u + obs).mean());
        }
        Ok(DetectorOutput {
            upward,
            phase,
            rejections: state.rejections,
            ops: state.ops,
            symbol_updates: (k_len * n_inner) as u64,
        })
    }
}

/// Root-mean-square phase error after removing the best single constant
/// offset, with differences taken modulo 2 pi.
pub fn phase_rmse(estimate: &[f64], truth: &[f64]) -> f64 {
    if estimate.is_empty() || estimate.len() != truth.len() {
        return f64::NAN;
    }
    let rot: Complex64 = estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| Complex64::from_polar(1.0, t - e))
        .sum();
    let offset = rot.arg();
    let sq: f64 = estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| wrap_angle(t - e - offset).powi(2))
        .sum();
    (sq / estimate.len() as f64).sqrt()
}
