//! BOLA-BASIC: utilities, static calibration, the objective, per-chunk
//! choice and decision-threshold profiles.

mod choose;
mod params;
mod profile;

pub use choose::{choose, objective, Decision, DecisionMode};
pub use params::{
    calibrate, first_crossover_intercept, BolaParams, CalibrationConfig, NegativePolicy,
    TopUtility, Version, VersionPreset,
};
pub use profile::{
    decision_sweep_oracle, sweep_changes, threshold_profile, Boundary, Segment, ThresholdProfile,
};

use crate::media::{Encoding, UtilityKind, DEFAULT_DB_CAP};

/// Utility of an encoding under `kind`, with the default dB cap.
pub fn utility_of(e: &Encoding, kind: UtilityKind) -> f64 {
    kind.utility(e.ssim, DEFAULT_DB_CAP)
        .expect("default cap is valid")
}
