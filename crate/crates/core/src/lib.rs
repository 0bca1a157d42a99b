//! BOLA-BASIC bitrate adaptation with SSIM as utility.
//!
//! * [`media`]: SSIM/dB conversion, encoding ladders, throughput traces and
//!   seeded generators for both.
//! * [`bola`]: static calibration of `V` and `γp`, the objective, per-chunk
//!   decisions and decision-threshold profiles.
//! * [`baseline`]: a rank-linear buffer-based baseline.
//! * [`sim`]: trace-driven session simulation and summary metrics.
//! * [`io`]: the CSV and JSON file formats.

pub mod baseline;
pub mod bola;
mod error;
pub mod io;
pub mod media;
pub mod sim;

pub use baseline::{bba_choose, BbaConfig};
pub use bola::{
    calibrate, choose, decision_sweep_oracle, objective, threshold_profile, utility_of, BolaParams,
    CalibrationConfig, Decision, DecisionMode, NegativePolicy, ThresholdProfile, TopUtility,
    Version, VersionPreset,
};
pub use error::{Error, Result};
pub use media::{
    average_ladder, db_to_ssim, gen_ladders, gen_trace, ssim_to_db, validate_ladder, AverageLadder,
    ChunkLadder, Encoding, LadderPolicy, Ssim, SsimDb, ThroughputTrace, UtilityKind,
};
pub use sim::{compare, simulate, summarize, Algorithm, SessionConfig, SimReport, Summary};
