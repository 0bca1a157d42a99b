//! Control parameters and their static calibration.
//!
//! BOLA-BASIC scores encoding `m` at buffer level `Q` as
//! `(V (v_m + γp) - Q) / S_m`. Every quantity downstream depends on γ and p
//! only through their product, so only `gamma_p` is stored.
//!
//! Calibration pins two thresholds of the *average* ladder:
//!
//! * the crossover between the two smallest formats lands on `min_buffer`;
//! * the zero crossing of the top utility lands on `max_buffer`.
//!
//! With `a = (S₂v₁ - S₁v₂) / (S₂ - S₁)` the first condition reads
//! `V (γp + a) = Q_min` and the second `V (v_top + γp) = Q_max`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{AverageLadder, Encoding, UtilityKind, DEFAULT_CHUNK_DURATION, DEFAULT_DB_CAP};

/// Which utility the top-of-ladder anchor uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "TopUtilityRepr", into = "TopUtilityRepr")]
pub enum TopUtility {
    /// The largest average utility in the calibration ladder.
    MaxAverage,
    /// A fixed ceiling, e.g. 1.0 for raw SSIM.
    MaxPossible(f64),
}

// `{"max_average":null}` / `{"max_possible":1.0}` on the wire.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TopUtilityRepr {
    MaxAverage(()),
    MaxPossible(f64),
}

impl From<TopUtilityRepr> for TopUtility {
    fn from(r: TopUtilityRepr) -> Self {
        match r {
            TopUtilityRepr::MaxAverage(()) => TopUtility::MaxAverage,
            TopUtilityRepr::MaxPossible(v) => TopUtility::MaxPossible(v),
        }
    }
}

impl From<TopUtility> for TopUtilityRepr {
    fn from(t: TopUtility) -> Self {
        match t {
            TopUtility::MaxAverage => TopUtilityRepr::MaxAverage(()),
            TopUtility::MaxPossible(v) => TopUtilityRepr::MaxPossible(v),
        }
    }
}

impl FromStr for TopUtility {
    type Err = Error;

    /// `max_average`, or a number for `max_possible`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "max_average" {
            return Ok(TopUtility::MaxAverage);
        }
        let v = s.strip_prefix("max_possible:").unwrap_or(s);
        v.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(TopUtility::MaxPossible)
            .ok_or_else(|| Error::config(format!("invalid top utility `{s}`")))
    }
}

/// What a server-side decision does when every objective is negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativePolicy {
    ArgmaxObjective,
    ArgmaxUtility,
}

impl NegativePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            NegativePolicy::ArgmaxObjective => "argmax_objective",
            NegativePolicy::ArgmaxUtility => "argmax_utility",
        }
    }
}

impl fmt::Display for NegativePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NegativePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "argmax_objective" => Ok(NegativePolicy::ArgmaxObjective),
            "argmax_utility" => Ok(NegativePolicy::ArgmaxUtility),
            other => Err(Error::config(format!("unknown negative policy `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Version {
    V1,
    V2,
}

impl Version {
    pub fn preset(self) -> VersionPreset {
        match self {
            Version::V1 => VersionPreset {
                utility_kind: UtilityKind::SsimDb,
                top_utility: TopUtility::MaxAverage,
                negative_policy: NegativePolicy::ArgmaxObjective,
            },
            Version::V2 => VersionPreset {
                utility_kind: UtilityKind::SsimRaw,
                top_utility: TopUtility::MaxPossible(1.0),
                negative_policy: NegativePolicy::ArgmaxUtility,
            },
        }
    }
}

impl FromStr for Version {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1" => Ok(Version::V1),
            "v2" => Ok(Version::V2),
            other => Err(Error::config(format!("unknown version `{other}`"))),
        }
    }
}

/// The three independent switches that separate the deployed variants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VersionPreset {
    pub utility_kind: UtilityKind,
    pub top_utility: TopUtility,
    pub negative_policy: NegativePolicy,
}

impl VersionPreset {
    pub fn calibration(&self) -> CalibrationConfig {
        CalibrationConfig {
            utility_kind: self.utility_kind,
            top_utility: self.top_utility,
            ..CalibrationConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationConfig {
    /// Seconds.
    pub min_buffer: f64,
    /// Seconds.
    pub max_buffer: f64,
    /// Seconds per chunk.
    pub chunk_duration: f64,
    pub utility_kind: UtilityKind,
    pub top_utility: TopUtility,
    pub db_cap: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            min_buffer: 3.0,
            max_buffer: 15.0,
            chunk_duration: DEFAULT_CHUNK_DURATION,
            utility_kind: UtilityKind::SsimRaw,
            top_utility: TopUtility::MaxPossible(1.0),
            db_cap: DEFAULT_DB_CAP,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_buffer > 0.0
            && self.min_buffer < self.max_buffer
            && self.max_buffer.is_finite())
        {
            return Err(Error::config(format!(
                "need 0 < min_buffer < max_buffer, got {} and {}",
                self.min_buffer, self.max_buffer
            )));
        }
        if !(self.chunk_duration > 0.0 && self.chunk_duration.is_finite()) {
            return Err(Error::config("chunk duration must be positive"));
        }
        if !(self.db_cap > 0.0 && self.db_cap.is_finite()) {
            return Err(Error::InvalidDbCap(self.db_cap));
        }
        if let TopUtility::MaxPossible(v) = self.top_utility {
            if !v.is_finite() {
                return Err(Error::config("top utility must be finite"));
            }
        }
        Ok(())
    }
}

/// Calibrated control parameters. Immutable once built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BolaParams {
    v_coef: f64,
    gamma_p: f64,
    calibration: CalibrationConfig,
}

impl BolaParams {
    pub fn new(v_coef: f64, gamma_p: f64, calibration: CalibrationConfig) -> Result<Self> {
        calibration.validate()?;
        if !(v_coef > 0.0 && v_coef.is_finite()) {
            return Err(Error::config(format!(
                "V must be positive and finite, got {v_coef}"
            )));
        }
        if !gamma_p.is_finite() {
            return Err(Error::config("gamma_p must be finite"));
        }
        Ok(BolaParams {
            v_coef,
            gamma_p,
            calibration,
        })
    }

    /// V, in seconds per utility unit.
    pub fn v_coef(&self) -> f64 {
        self.v_coef
    }

    /// The product γp, in utility units.
    pub fn gamma_p(&self) -> f64 {
        self.gamma_p
    }

    pub fn utility_kind(&self) -> UtilityKind {
        self.calibration.utility_kind
    }

    pub fn calibration(&self) -> &CalibrationConfig {
        &self.calibration
    }

    pub fn utility(&self, e: &Encoding) -> f64 {
        self.calibration
            .utility_kind
            .utility(e.ssim, self.calibration.db_cap)
            .expect("dB cap validated at construction")
    }

    /// Buffer level (seconds) at which an encoding of utility `v` stops
    /// having a nonnegative objective: `V (v + γp)`.
    pub fn zero_crossing(&self, v: f64) -> f64 {
        self.v_coef * (v + self.gamma_p)
    }
}

/// Utility intercept of the line through the first two average formats,
/// evaluated at size zero.
pub fn first_crossover_intercept(avg: &AverageLadder) -> Result<f64> {
    if avg.len() < 2 {
        return Err(Error::TooFewFormats(avg.len()));
    }
    let (s1, s2) = (avg.sizes()[0], avg.sizes()[1]);
    let (v1, v2) = (avg.utilities()[0], avg.utilities()[1]);
    Ok((s2 * v1 - s1 * v2) / (s2 - s1))
}

/// Positions of the average ladder that sit strictly on the upper concave hull
/// of `(size, utility)`, i.e. that win the objective for some buffer range.
fn hull_positions(avg: &AverageLadder) -> Vec<usize> {
    let (s, v) = (avg.sizes(), avg.utilities());
    let mut hull: Vec<usize> = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        // equal utility at a larger size never wins
        if hull.last().is_some_and(|&last| v[i] <= v[last]) {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless a→b is strictly steeper than b→i
            let cross = (v[b] - v[a]) * (s[i] - s[b]) - (v[i] - v[b]) * (s[b] - s[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Solves for V and γp from long-run averages.
///
/// Errors if the second-smallest average format never wins the objective
/// (its crossover with the smallest would not be a threshold) or if the top
/// utility does not exceed the first-crossover intercept.
pub fn calibrate(avg: &AverageLadder, cfg: &CalibrationConfig) -> Result<BolaParams> {
    cfg.validate()?;
    if avg.utility_kind() != cfg.utility_kind {
        return Err(Error::UtilityKindMismatch {
            expected: cfg.utility_kind,
            found: avg.utility_kind(),
        });
    }
    let intercept = first_crossover_intercept(avg)?;

    let hull = hull_positions(avg);
    if hull.get(1) != Some(&1) {
        return Err(Error::OffEnvelope { position: 1 });
    }
    for pos in (2..avg.len()).filter(|p| !hull.contains(p)) {
        log::warn!("average format position {pos} is never chosen at its average size/utility");
    }

    let top = match cfg.top_utility {
        TopUtility::MaxAverage => avg.max_utility(),
        TopUtility::MaxPossible(v) => v,
    };
    if top.is_nan() || top <= intercept {
        return Err(Error::NoPositiveV { top, intercept });
    }
    let v_coef = (cfg.max_buffer - cfg.min_buffer) / (top - intercept);
    let gamma_p = cfg.min_buffer / v_coef - intercept;
    if gamma_p < 0.0 {
        log::warn!("calibrated gamma_p = {gamma_p} is negative");
    }
    BolaParams::new(v_coef, gamma_p, *cfg)
}
