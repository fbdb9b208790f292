pub mod detector;
pub mod directional;
pub mod error;
pub mod ldpc;
pub mod modem;
pub mod receiver;
pub mod simkit;

pub use error::{Error, Result};
pub use num_complex::{self, Complex64};
pub use simkit::ScenarioPreset;
