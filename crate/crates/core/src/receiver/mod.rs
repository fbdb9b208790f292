//! Iterative receiver: phase detection, demapping and LDPC decoding with
//! turbo feedback from the decoder to the detector.

mod llr;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use llr::{bit_llrs_to_pmf, pmf_to_bit_llrs};

use crate::detector::{
    phase_rmse, DetectorConfig, DetectorInput, DetectorVariant, OpCounts, PhaseDetector,
    SymbolPmf, SymbolRejection,
};
use crate::directional::BrMode;
use crate::error::{Error, Result};
use crate::ldpc::LdpcCode;
use crate::modem::{ChannelParams, Constellation, Frame, FramePlan};

/// Inner detector, decoder and turbo iteration counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationSchedule {
    pub n_detector: usize,
    pub n_decoder: usize,
    pub n_turbo: usize,
}

impl IterationSchedule {
    pub const fn new(n_detector: usize, n_decoder: usize, n_turbo: usize) -> Self {
        Self {
            n_detector,
            n_decoder,
            n_turbo,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_detector == 0 || self.n_decoder == 0 || self.n_turbo == 0 {
            return Err(Error::Config(format!(
                "iteration counts must be >= 1, got {}-{}-{}",
                self.n_detector, self.n_decoder, self.n_turbo
            )));
        }
        Ok(())
    }
}

/// Where the phase information comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReceiverMode {
    /// Estimate the phase with the configured detector.
    #[default]
    Detector,
    /// Use the true phase trajectory and demap coherently.
    KnownPhase,
    /// Treat every transmitted symbol as known to the phase estimator; only
    /// the own symbol is excluded when forming each upward message.
    AllPilots,
}

/// Scaling of the noise variance assumed by the detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct N0Inflation {
    pub factor: f64,
    /// Applied only when the operating Eb/N0 (dB) is above this value.
    #[serde(default)]
    pub min_ebn0_db: Option<f64>,
}

impl N0Inflation {
    pub fn factor_at(&self, ebn0_db: f64) -> f64 {
        match self.min_ebn0_db {
            Some(t) if ebn0_db <= t => 1.0,
            _ => self.factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverConfig {
    pub schedule: IterationSchedule,
    pub detector: DetectorConfig,
    #[serde(default)]
    pub mode: ReceiverMode,
    #[serde(default)]
    pub n0_inflation: Option<N0Inflation>,
    /// Angular thresholds of the two decision-directed rejection rules.
    #[serde(default = "default_dd_thresholds")]
    pub decision_thresholds: (f64, f64),
    /// Keep decoder messages between turbo iterations.
    #[serde(default)]
    pub warm_start: bool,
}

fn default_dd_thresholds() -> (f64, f64) {
    (PI / 6.0, PI / 4.0)
}

impl ReceiverConfig {
    pub fn new(detector: DetectorConfig, schedule: IterationSchedule) -> Self {
        Self {
            schedule,
            detector,
            mode: ReceiverMode::Detector,
            n0_inflation: None,
            decision_thresholds: default_dd_thresholds(),
            warm_start: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.detector.validate()?;
        if let Some(inf) = &self.n0_inflation {
            if !(inf.factor >= 1.0) || !inf.factor.is_finite() {
                return Err(Error::Config(format!(
                    "N0 inflation factor must be >= 1, got {}",
                    inf.factor
                )));
            }
        }
        let (a, b) = self.decision_thresholds;
        if !(a > 0.0 && a < b && b <= PI) {
            return Err(Error::Config(format!(
                "decision-directed thresholds must satisfy 0 < {a} < {b} <= pi"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationDiagnostics {
    pub phase_rmse: f64,
    pub rejections: usize,
    pub ops: OpCounts,
    pub symbol_updates: u64,
    pub decoder_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverOutput {
    /// Decoded information bits.
    pub decoded_bits: Vec<u8>,
    pub converged: bool,
    pub turbo_iterations: usize,
    pub diagnostics: Vec<IterationDiagnostics>,
}

/// Everything a receiver needs besides the frame.
#[derive(Debug, Clone, Copy)]
pub struct ReceiverContext<'a> {
    pub code: &'a LdpcCode,
    pub plan: &'a FramePlan,
    pub constellation: &'a Constellation,
    pub channel: ChannelParams,
    /// Operating point, consulted by the N0 inflation rule.
    pub ebn0_db: f64,
}

/// Decode one received frame.
pub fn run_receiver(frame: &Frame, ctx: &ReceiverContext<'_>, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    let k_len = ctx.plan.len();
    if frame.received.len() != k_len {
        return Err(Error::LengthMismatch {
            what: "received samples",
            expected: k_len,
            got: frame.received.len(),
        });
    }
    let n_code = ctx.code.n();
    if ctx.plan.payload_len() * ctx.constellation.bits_per_symbol() != n_code {
        return Err(Error::LengthMismatch {
            what: "payload bits vs code length",
            expected: n_code,
            got: ctx.plan.payload_len() * ctx.constellation.bits_per_symbol(),
        });
    }
    match cfg.mode {
        ReceiverMode::KnownPhase => known_phase(frame, ctx, cfg),
        ReceiverMode::AllPilots => all_pilots(frame, ctx, cfg),
        ReceiverMode::Detector => turbo(frame, ctx, cfg),
    }
}

fn payload_pmfs(pmfs: &[SymbolPmf], plan: &FramePlan) -> Vec<SymbolPmf> {
    plan.payload_positions().iter().map(|&k| pmfs[k].clone()).collect()
}

fn pilot_priors(plan: &FramePlan, m: usize) -> Vec<SymbolPmf> {
    (0..plan.len())
        .map(|k| match plan.pilot_symbol(k) {
            Some(s) => SymbolPmf::indicator(m, s),
            None => SymbolPmf::uniform(m),
        })
        .collect()
}

fn decode_once(
    ctx: &ReceiverContext<'_>,
    cfg: &ReceiverConfig,
    llrs: &[f64],
    diag: IterationDiagnostics,
) -> ReceiverOutput {
    let dec = ctx.code.decoder().decode(llrs, cfg.schedule.n_decoder);
    ReceiverOutput {
        decoded_bits: ctx.code.extract_info(&dec.hard_bits),
        converged: dec.converged,
        turbo_iterations: 1,
        diagnostics: vec![IterationDiagnostics {
            decoder_iterations: dec.iterations,
            ..diag
        }],
    }
}

fn known_phase(frame: &Frame, ctx: &ReceiverContext<'_>, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    if frame.true_phase.len() != ctx.plan.len() {
        return Err(Error::invalid("known-phase decoding needs the true phase trajectory"));
    }
    let half_inv = 0.5 / ctx.channel.sigma2;
    let pmfs: Vec<SymbolPmf> = ctx
        .plan
        .payload_positions()
        .iter()
        .map(|&k| {
            let derot = frame.received[k] * Complex64::from_polar(1.0, -frame.true_phase[k]);
            let logs: Vec<f64> = ctx
                .constellation
                .points()
                .iter()
                .map(|c| -(derot - c).norm_sqr() * half_inv)
                .collect();
            SymbolPmf::from_log(&logs)
        })
        .collect();
    let llrs = pmf_to_bit_llrs(&pmfs, ctx.constellation);
    let diag = IterationDiagnostics {
        phase_rmse: 0.0,
        rejections: 0,
        ops: OpCounts::default(),
        symbol_updates: 0,
        decoder_iterations: 0,
    };
    Ok(decode_once(ctx, cfg, &llrs, diag))
}

fn all_pilots(frame: &Frame, ctx: &ReceiverContext<'_>, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    let m = ctx.constellation.size();
    let priors: Vec<SymbolPmf> = frame
        .symbol_indices
        .iter()
        .map(|&s| SymbolPmf::indicator(m, s))
        .collect();
    let mut det_cfg = DetectorConfig::for_variant(DetectorVariant::Tp);
    det_cfg.br_mode = BrMode::Exact;
    let detector = PhaseDetector {
        cfg: &det_cfg,
        constellation: ctx.constellation,
        sigma2: ctx.channel.sigma2,
        sigma_delta: ctx.channel.sigma_delta,
    };
    let out = detector.run(
        DetectorInput {
            received: &frame.received,
            priors: &priors,
            pilot_mask: ctx.plan.pilot_mask(),
            rejection: None,
        },
        1,
    )?;
    let llrs = pmf_to_bit_llrs(&payload_pmfs(&out.upward, ctx.plan), ctx.constellation);
    let diag = IterationDiagnostics {
        phase_rmse: phase_rmse(&out.phase, &frame.true_phase),
        rejections: 0,
        ops: out.ops,
        symbol_updates: out.symbol_updates,
        decoder_iterations: 0,
    };
    Ok(decode_once(ctx, cfg, &llrs, diag))
}

fn turbo(frame: &Frame, ctx: &ReceiverContext<'_>, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    let m = ctx.constellation.size();
    let plan = ctx.plan;
    let inflation = cfg.n0_inflation.map_or(1.0, |i| i.factor_at(ctx.ebn0_db));
    let detector = PhaseDetector {
        cfg: &cfg.detector,
        constellation: ctx.constellation,
        sigma2: ctx.channel.sigma2 * inflation,
        sigma_delta: ctx.channel.sigma_delta,
    };
    let decision_directed = cfg.detector.decision_directed && cfg.detector.variant.is_ep();
    let mut priors = pilot_priors(plan, m);
    let mut prev_max = vec![0.0; plan.len()];
    let mut overrides = vec![SymbolRejection::Config; plan.len()];
    let mut decoder = ctx.code.decoder();
    let mut diagnostics = Vec::with_capacity(cfg.schedule.n_turbo);
    let mut last = None;

    for t in 0..cfg.schedule.n_turbo {
        if decision_directed {
            for &k in plan.payload_positions() {
                let p = priors[k].max_prob();
                overrides[k] = if t > 0 && p > prev_max[k] {
                    SymbolRejection::Off
                } else {
                    SymbolRejection::decision_directed(p, cfg.decision_thresholds)
                };
                prev_max[k] = p;
            }
        }
        let out = detector.run(
            DetectorInput {
                received: &frame.received,
                priors: &priors,
                pilot_mask: plan.pilot_mask(),
                rejection: decision_directed.then_some(&overrides[..]),
            },
            cfg.schedule.n_detector,
        )?;
        let llrs = pmf_to_bit_llrs(&payload_pmfs(&out.upward, plan), ctx.constellation);
        if !cfg.warm_start {
            decoder.reset();
        }
        let dec = decoder.decode(&llrs, cfg.schedule.n_decoder);
        diagnostics.push(IterationDiagnostics {
            phase_rmse: phase_rmse(&out.phase, &frame.true_phase),
            rejections: out.rejections,
            ops: out.ops,
            symbol_updates: out.symbol_updates,
            decoder_iterations: dec.iterations,
        });
        let converged = dec.converged;
        if t + 1 < cfg.schedule.n_turbo && !converged {
            let fed_back = bit_llrs_to_pmf(&dec.llr_extrinsic, ctx.constellation);
            for (&k, pmf) in plan.payload_positions().iter().zip(fed_back) {
                priors[k] = pmf;
            }
        }
        last = Some(dec);
        if converged {
            break;
        }
    }
    let dec = last.expect("at least one turbo iteration");
    Ok(ReceiverOutput {
        decoded_bits: ctx.code.extract_info(&dec.hard_bits),
        converged: dec.converged,
        turbo_iterations: diagnostics.len(),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_validation() {
        assert!(IterationSchedule::new(1, 0, 1).validate().is_err());
        IterationSchedule::new(2, 200, 1).validate().unwrap();
    }

    #[test]
    fn inflation_threshold() {
        let i = N0Inflation {
            factor: 1.25,
            min_ebn0_db: Some(2.0),
        };
        assert_eq!(i.factor_at(1.5), 1.0);
        assert_eq!(i.factor_at(2.5), 1.25);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ReceiverConfig::new(
            DetectorConfig::for_variant(DetectorVariant::Tp),
            IterationSchedule::new(1, 10, 1),
        );
        cfg.validate().unwrap();
        cfg.n0_inflation = Some(N0Inflation {
            factor: 0.9,
            min_ebn0_db: None,
        });
        assert!(cfg.validate().is_err());
        cfg.n0_inflation = None;
        cfg.decision_thresholds = (1.0, 0.5);
        assert!(cfg.validate().is_err());
    }
}
