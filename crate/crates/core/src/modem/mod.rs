//! Constellations, pilot framing and the phase-noise channel.

mod channel;
mod constellation;
mod frame;

pub use channel::{apply_channel, ebn0_to_sigma2, generate_phase, ChannelParams};
pub use constellation::{Constellation, ConstellationKind};
pub use frame::{build_frame, Frame, FramePlan, PilotPattern};
