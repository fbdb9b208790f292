//! Phase detection on the factor graph: Tikhonov-parametric filtering with
//! plain projection (TP) or expectation propagation (EP) updates, and a
//! discretized-phase forward-backward reference detector.

mod config;
mod dpbcjr;
mod filter;
mod message;
mod ops;
mod pmf;

pub use config::{DetectorConfig, DetectorVariant, RejectionRule, RejectionRules, SymbolRejection};
pub use dpbcjr::{dp_bcjr, transition_kernel, DpBcjrOutput, DpBcjrParams, KERNEL_SPAN_SIGMAS};
pub use filter::{
    filter_pass, phase_rmse, DetectorInput, DetectorOutput, DetectorState, Direction, PassData,
    PhaseDetector,
};
pub use message::{
    damp, ep_project, observation_mixture, rejection_check, shifted_mixture, tp_project,
    upward_symbol_message, wrap_angle, EpOutcome, REJECTION_MIN_PRIOR,
};
pub use ops::OpCounts;
pub use pmf::SymbolPmf;
