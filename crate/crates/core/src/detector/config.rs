use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::directional::BrMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorVariant {
    Tp,
    EpNative,
    EpDamped,
    EpModified,
    DpBcjr,
}

impl DetectorVariant {
    pub const ALL: [DetectorVariant; 5] = [
        DetectorVariant::Tp,
        DetectorVariant::EpNative,
        DetectorVariant::EpDamped,
        DetectorVariant::EpModified,
        DetectorVariant::DpBcjr,
    ];

    pub fn is_ep(self) -> bool {
        matches!(
            self,
            DetectorVariant::EpNative | DetectorVariant::EpDamped | DetectorVariant::EpModified
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            DetectorVariant::Tp => "TP",
            DetectorVariant::EpNative => "EP",
            DetectorVariant::EpDamped => "EP-damped",
            DetectorVariant::EpModified => "EP-Mod",
            DetectorVariant::DpBcjr => "dp-BCJR",
        }
    }

    /// Inner detector iterations the variant is normally run with.
    pub fn default_inner_iterations(self) -> usize {
        match self {
            DetectorVariant::EpModified => 2,
            _ => 1,
        }
    }
}

/// A rejection condition: the observation is discarded when more than
/// `max_inconsistent` mixture modes deviate from the prior mean by more
/// than `threshold` radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RejectionRule {
    pub threshold: f64,
    pub max_inconsistent: usize,
}

impl RejectionRule {
    pub const fn new(threshold: f64, max_inconsistent: usize) -> Self {
        Self {
            threshold,
            max_inconsistent,
        }
    }
}

pub type RejectionRules = SmallVec<[RejectionRule; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub variant: DetectorVariant,
    /// Damping weight given to the newest observation message.
    pub damping: f64,
    pub br_mode: BrMode,
    /// Conditions joined by logical OR. Empty disables rejection.
    #[serde(default)]
    pub rejection: Vec<RejectionRule>,
    /// Derive per-symbol rejection limits from the decoder feedback.
    #[serde(default)]
    pub decision_directed: bool,
    /// Phase grid size for the discretized-phase detector.
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
}

fn default_n_theta() -> usize {
    512
}

impl DetectorConfig {
    pub fn for_variant(variant: DetectorVariant) -> Self {
        let (damping, br_mode, rejection) = match variant {
            DetectorVariant::Tp | DetectorVariant::DpBcjr => (1.0, BrMode::Exact, vec![]),
            DetectorVariant::EpNative => (1.0, BrMode::ExpApprox, vec![]),
            DetectorVariant::EpDamped => (0.4, BrMode::ExpApprox, vec![]),
            DetectorVariant::EpModified => (
                0.4,
                BrMode::PiecewiseInverse,
                vec![RejectionRule::new(PI / 2.0, 0)],
            ),
        };
        Self {
            variant,
            damping,
            br_mode,
            rejection,
            decision_directed: false,
            n_theta: default_n_theta(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.damping) {
            return Err(Error::Config(format!(
                "damping must lie in [0, 1], got {}",
                self.damping
            )));
        }
        if self.variant == DetectorVariant::DpBcjr && self.n_theta < 2 {
            return Err(Error::Config(format!(
                "phase grid needs at least 2 points, got {}",
                self.n_theta
            )));
        }
        for r in &self.rejection {
            if !(r.threshold > 0.0 && r.threshold <= PI) {
                return Err(Error::Config(format!(
                    "rejection threshold {} outside (0, pi]",
                    r.threshold
                )));
            }
        }
        for w in self.rejection.windows(2) {
            if !(w[0].threshold < w[1].threshold && w[0].max_inconsistent > w[1].max_inconsistent) {
                return Err(Error::Config(
                    "rejection rules must have increasing thresholds and decreasing limits".into(),
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn rules(&self) -> RejectionRules {
        self.rejection.iter().copied().collect()
    }
}

/// Per-symbol choice of rejection conditions.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SymbolRejection {
    /// Use the rules from [`DetectorConfig`].
    #[default]
    Config,
    Custom(RejectionRules),
    Off,
}

impl SymbolRejection {
    /// Two-rule decision-directed limits `round(2 p)` and `round(p)` for the
    /// largest symbol probability `p`.
    pub fn decision_directed(max_prob: f64, thresholds: (f64, f64)) -> Self {
        SymbolRejection::Custom(smallvec![
            RejectionRule::new(thresholds.0, (2.0 * max_prob).round() as usize),
            RejectionRule::new(thresholds.1, max_prob.round() as usize),
        ])
    }
}
