//! SSIM scores and their decibel form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cap applied to SSIM = 1 (and anything closer to 1 than `1 - 1e-6`).
pub const DEFAULT_DB_CAP: f64 = 60.0;

/// A structural similarity score in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Ssim(f64);

impl Ssim {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Ssim(value))
        } else {
            Err(Error::InvalidSsim(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_db(self, db_cap: f64) -> Result<SsimDb> {
        ssim_to_db(self, db_cap)
    }
}

impl<'de> Deserialize<'de> for Ssim {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Ssim::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Ssim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// SSIM expressed in decibels, `-10 log10(1 - ssim)`, bounded by a cap.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SsimDb(f64);

impl SsimDb {
    pub fn new(value: f64, db_cap: f64) -> Result<Self> {
        check_cap(db_cap)?;
        if value > 0.0 && value <= db_cap {
            Ok(SsimDb(value))
        } else {
            Err(Error::InvalidSsimDb { value, cap: db_cap })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for SsimDb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dB", self.0)
    }
}

fn check_cap(db_cap: f64) -> Result<()> {
    if db_cap > 0.0 && db_cap.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDbCap(db_cap))
    }
}

/// Converts SSIM to decibels, saturating at `db_cap`.
pub fn ssim_to_db(s: Ssim, db_cap: f64) -> Result<SsimDb> {
    check_cap(db_cap)?;
    // ln_1p keeps precision for small ssim; for s = 1 it yields -inf and the cap applies.
    let db = -10.0 * (-s.0).ln_1p() / std::f64::consts::LN_10;
    Ok(SsimDb(db.min(db_cap)))
}

/// Inverse of [`ssim_to_db`] below the cap.
pub fn db_to_ssim(d: f64) -> Result<Ssim> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidSsimDb {
            value: d,
            cap: f64::INFINITY,
        });
    }
    // 1 - 10^(-d/10) without cancellation
    let s = -(-d / 10.0 * std::f64::consts::LN_10).exp_m1();
    Ssim::new(s)
}

/// How an encoding's SSIM becomes BOLA utility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    SsimRaw,
    SsimDb,
}

impl UtilityKind {
    pub fn utility(self, s: Ssim, db_cap: f64) -> Result<f64> {
        match self {
            UtilityKind::SsimRaw => Ok(s.value()),
            UtilityKind::SsimDb => Ok(ssim_to_db(s, db_cap)?.value()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UtilityKind::SsimRaw => "ssim_raw",
            UtilityKind::SsimDb => "ssim_db",
        }
    }
}

impl fmt::Display for UtilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for UtilityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ssim_raw" | "raw" => Ok(UtilityKind::SsimRaw),
            "ssim_db" | "db" => Ok(UtilityKind::SsimDb),
            other => Err(Error::config(format!("unknown utility kind `{other}`"))),
        }
    }
}
