//! Buffer-based baseline.
//!
//! A rank-linear simplification of BBA: the format index rises linearly with
//! buffer level between the reservoir and the cushion. It looks only at the
//! buffer and the number of formats, never at sizes or quality.

use crate::bola::Decision;
use crate::error::{Error, Result};
use crate::media::ChunkLadder;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BbaConfig {
    /// Seconds.
    pub reservoir: f64,
    /// Seconds.
    pub cushion: f64,
}

impl Default for BbaConfig {
    fn default() -> Self {
        BbaConfig {
            reservoir: 3.0,
            cushion: 15.0,
        }
    }
}

impl BbaConfig {
    pub fn new(reservoir: f64, cushion: f64) -> Result<Self> {
        let cfg = BbaConfig { reservoir, cushion };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reservoir > 0.0 && self.reservoir < self.cushion && self.cushion.is_finite() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "need 0 < reservoir < cushion, got {} and {}",
                self.reservoir, self.cushion
            )))
        }
    }

    /// Ladder position for `formats` encodings at buffer `q`.
    pub fn rank(&self, formats: usize, q: f64) -> usize {
        let top = formats.saturating_sub(1);
        if q <= self.reservoir {
            0
        } else if q >= self.cushion {
            top
        } else {
            let x = top as f64 * (q - self.reservoir) / (self.cushion - self.reservoir);
            (x.floor() as usize).min(top)
        }
    }
}

/// Always sends; never pauses.
pub fn bba_choose(cfg: &BbaConfig, ladder: &ChunkLadder, q: f64) -> Decision {
    let rank = cfg.rank(ladder.len(), q);
    Decision::Send(ladder.encodings()[rank].format_id)
}
