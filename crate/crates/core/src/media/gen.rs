//! Seeded synthetic ladders and traces.
//!
//! Ladders model content whose quality moves independently of its size:
//! every chunk gets a quality shift (easy scenes look better at the same
//! bitrate) and, separately, a size factor. Both scale with `volatility`,
//! so `volatility == 0` reproduces the base ladder for every chunk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::media::ladder::{
    validate_ladder, ChunkLadder, Encoding, LadderCandidate, LadderPolicy, DEFAULT_CHUNK_DURATION,
};
use crate::media::quality::{db_to_ssim, DEFAULT_DB_CAP};
use crate::media::trace::{ThroughputTrace, TraceSegment};

const LOW_KBPS: f64 = 150.0;
const HIGH_KBPS: f64 = 4000.0;
const LOW_DB: f64 = 8.5;
const HIGH_DB: f64 = 17.7;
/// Curvature of the base quality-vs-rank curve.
const QUALITY_BEND: f64 = 2.2;
/// Log-size spread per dB of quality volatility.
const SIZE_PER_DB: f64 = 0.1;
const MIN_DB: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct LadderGenConfig {
    /// Bytes per format, strictly increasing.
    pub base_sizes: Vec<u64>,
    /// SSIM dB per format, nondecreasing.
    pub base_db: Vec<f64>,
    pub chunks: usize,
    /// Standard deviation, in dB, of the per-chunk quality shift.
    pub volatility: f64,
    pub chunk_duration: f64,
    pub db_cap: f64,
    pub seed: u64,
}

impl LadderGenConfig {
    /// A ladder spanning 150 kbps to 4 Mbps with quality topping out near
    /// SSIM 0.983.
    pub fn with_formats(formats: usize, chunks: usize, volatility: f64, seed: u64) -> Self {
        let chunk_duration = DEFAULT_CHUNK_DURATION;
        let span = formats.saturating_sub(1).max(1) as f64;
        let mut base_sizes = Vec::with_capacity(formats);
        let mut base_db = Vec::with_capacity(formats);
        for k in 0..formats {
            let x = if formats == 1 { 1.0 } else { k as f64 / span };
            let kbps = LOW_KBPS * (HIGH_KBPS / LOW_KBPS).powf(x);
            base_sizes.push((kbps * 1000.0 / 8.0 * chunk_duration).round() as u64);
            let bend = (1.0 - (-QUALITY_BEND * x).exp()) / (1.0 - (-QUALITY_BEND).exp());
            base_db.push(LOW_DB + (HIGH_DB - LOW_DB) * bend);
        }
        LadderGenConfig {
            base_sizes,
            base_db,
            chunks,
            volatility,
            chunk_duration,
            db_cap: DEFAULT_DB_CAP,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.base_sizes.is_empty() || self.chunks == 0 {
            return Err(Error::config("need at least one format and one chunk"));
        }
        if self.base_sizes.len() != self.base_db.len() {
            return Err(Error::config(
                "base sizes and base qualities differ in length",
            ));
        }
        if !(self.volatility >= 0.0 && self.volatility.is_finite()) {
            return Err(Error::config("volatility must be nonnegative"));
        }
        if self.base_sizes[0] == 0 || self.base_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "base sizes must be positive and strictly increasing",
            ));
        }
        if self
            .base_db
            .iter()
            .any(|d| !(*d > 0.0 && *d <= self.db_cap))
            || self.base_db.windows(2).any(|w| w[1] < w[0])
        {
            return Err(Error::config(
                "base qualities must lie in (0, cap] and be nondecreasing",
            ));
        }
        Ok(())
    }
}

/// Generates `config.chunks` ladders; a pure function of `config`.
pub fn gen_ladders(config: &LadderGenConfig) -> Result<Vec<ChunkLadder>> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sigma = config.volatility;
    let m = config.base_sizes.len();
    let mut out = Vec::with_capacity(config.chunks);

    for chunk in 0..config.chunks {
        let shift: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
        let size_factor = (sigma * SIZE_PER_DB * rng.sample::<f64, _>(StandardNormal)).exp();

        let mut encodings = Vec::with_capacity(m);
        let mut prev_db = f64::NEG_INFINITY;
        let mut prev_size = 0u64;
        for k in 0..m {
            let jitter: f64 = 0.25 * sigma * rng.sample::<f64, _>(StandardNormal);
            let db = (config.base_db[k] + shift + jitter)
                .clamp(MIN_DB, config.db_cap - 1.0)
                .max(prev_db);
            prev_db = db;
            let size =
                ((config.base_sizes[k] as f64 * size_factor).round() as u64).max(prev_size + 1);
            prev_size = size;
            encodings.push(Encoding {
                format_id: k as u32,
                size,
                ssim: db_to_ssim(db)?,
            });
        }
        let candidate = LadderCandidate {
            chunk_index: chunk as u32,
            duration: config.chunk_duration,
            encodings,
        };
        out.push(validate_ladder(candidate, LadderPolicy::Reject)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum TracePattern {
    Constant {
        bytes_per_sec: f64,
    },
    /// Alternates `high`, `low`, `high`, … with each level held for `period` seconds.
    SquareWave {
        low: f64,
        high: f64,
        period: f64,
        segments: usize,
    },
    /// Independent log-normal bandwidth per segment with the given mean.
    LogNormal {
        mean_bytes_per_sec: f64,
        sigma: f64,
        segment_duration: f64,
        segments: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceGenConfig {
    pub pattern: TracePattern,
    pub seed: u64,
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("{what} must be positive, got {x}")))
    }
}

pub fn gen_trace(config: &TraceGenConfig) -> Result<ThroughputTrace> {
    let segments = match config.pattern {
        TracePattern::Constant { bytes_per_sec } => {
            positive(bytes_per_sec, "bandwidth")?;
            vec![TraceSegment {
                start: 0.0,
                bytes_per_sec,
            }]
        }
        TracePattern::SquareWave {
            low,
            high,
            period,
            segments,
        } => {
            positive(low, "low bandwidth")?;
            positive(high, "high bandwidth")?;
            positive(period, "period")?;
            (0..segments.max(1))
                .map(|i| TraceSegment {
                    start: i as f64 * period,
                    bytes_per_sec: if i % 2 == 0 { high } else { low },
                })
                .collect()
        }
        TracePattern::LogNormal {
            mean_bytes_per_sec,
            sigma,
            segment_duration,
            segments,
        } => {
            positive(mean_bytes_per_sec, "mean bandwidth")?;
            positive(segment_duration, "segment duration")?;
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(Error::config("sigma must be nonnegative"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..segments.max(1))
                .map(|i| {
                    let z: f64 = rng.sample(StandardNormal);
                    TraceSegment {
                        start: i as f64 * segment_duration,
                        bytes_per_sec: mean_bytes_per_sec * (sigma * z - 0.5 * sigma * sigma).exp(),
                    }
                })
                .collect()
        }
    };
    ThroughputTrace::new(segments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_ladders_are_reproducible() {
        let cfg = LadderGenConfig::with_formats(10, 50, 2.0, 7);
        assert_eq!(gen_ladders(&cfg).unwrap(), gen_ladders(&cfg).unwrap());
        let other = LadderGenConfig {
            seed: 8,
            ..cfg.clone()
        };
        assert_ne!(gen_ladders(&cfg).unwrap(), gen_ladders(&other).unwrap());
    }

    #[test]
    fn zero_volatility_repeats_base() {
        let cfg = LadderGenConfig::with_formats(10, 20, 0.0, 3);
        let ladders = gen_ladders(&cfg).unwrap();
        for l in &ladders {
            assert_eq!(l.encodings(), ladders[0].encodings());
            let sizes: Vec<u64> = l.encodings().iter().map(|e| e.size).collect();
            assert_eq!(sizes, cfg.base_sizes);
            for (e, db) in l.encodings().iter().zip(&cfg.base_db) {
                assert_eq!(e.ssim, db_to_ssim(*db).unwrap());
            }
        }
    }

    #[test]
    fn volatility_spreads_quality() {
        let cfg = LadderGenConfig::with_formats(10, 20, 1.5, 1);
        let ladders = gen_ladders(&cfg).unwrap();
        let first = ladders[0].encodings()[0].ssim;
        assert!(ladders.iter().any(|l| l.encodings()[0].ssim != first));
    }

    #[test]
    fn base_ladder_shape() {
        let cfg = LadderGenConfig::with_formats(10, 1, 0.0, 0);
        assert_eq!(cfg.base_sizes.len(), 10);
        assert!((cfg.base_db[9] - HIGH_DB).abs() < 1e-12);
        assert!((cfg.base_db[0] - LOW_DB).abs() < 1e-12);
        let single = LadderGenConfig::with_formats(1, 4, 1.0, 0);
        assert_eq!(gen_ladders(&single).unwrap().len(), 4);
    }

    #[test]
    fn degenerate_configs() {
        assert!(gen_ladders(&LadderGenConfig::with_formats(0, 5, 1.0, 0)).is_err());
        assert!(gen_ladders(&LadderGenConfig::with_formats(3, 0, 1.0, 0)).is_err());
        assert!(gen_ladders(&LadderGenConfig::with_formats(3, 2, -1.0, 0)).is_err());
    }

    #[test]
    fn constant_trace() {
        let t = gen_trace(&TraceGenConfig {
            pattern: TracePattern::Constant { bytes_per_sec: 1e6 },
            seed: 0,
        })
        .unwrap();
        assert_eq!(
            t.segments(),
            &[TraceSegment {
                start: 0.0,
                bytes_per_sec: 1e6
            }]
        );
    }

    #[test]
    fn square_wave_boundaries() {
        let t = gen_trace(&TraceGenConfig {
            pattern: TracePattern::SquareWave {
                low: 1e5,
                high: 1e6,
                period: 10.0,
                segments: 4,
            },
            seed: 0,
        })
        .unwrap();
        let starts: Vec<f64> = t.segments().iter().map(|s| s.start).collect();
        assert_eq!(starts, vec![0.0, 10.0, 20.0, 30.0]);
        assert_eq!(t.bandwidth_at(15.0), 1e5);
    }

    #[test]
    fn lognormal_trace_is_seeded() {
        let cfg = TraceGenConfig {
            pattern: TracePattern::LogNormal {
                mean_bytes_per_sec: 5e5,
                sigma: 0.6,
                segment_duration: 5.0,
                segments: 100,
            },
            seed: 11,
        };
        assert_eq!(gen_trace(&cfg).unwrap(), gen_trace(&cfg).unwrap());
    }

    #[test]
    fn bad_bandwidth() {
        for pattern in [
            TracePattern::Constant { bytes_per_sec: 0.0 },
            TracePattern::SquareWave {
                low: -1.0,
                high: 1.0,
                period: 1.0,
                segments: 2,
            },
        ] {
            assert!(gen_trace(&TraceGenConfig { pattern, seed: 0 }).is_err());
        }
    }
}
