//! Monte Carlo harness: scenario configuration, deterministic per-frame
//! seeding, stop rules, operation counting and result files.

mod config;
mod ops;
mod run;

pub use config::{
    parse_ebn0_grid, parse_variant, CodeSource, RunConfig, RunConfigFile, ScenarioConfig,
    ScenarioPreset, StopRule,
};
pub use ops::{count_ops, measured_ops, polyfit_r2, predicted_ops, OpsReport, CALIBRATION_SYMBOLS};
pub use run::{
    frame_seed, read_csv, with_workers, write_csv, write_outputs, BerRecord, FrameResult,
    Simulation, CSV_COLUMNS,
};
