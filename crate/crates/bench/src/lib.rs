//! Shared fixtures for the benchmarks.

use bola_ssim::bola::{calibrate, BolaParams, Version};
use bola_ssim::media::{
    average_ladder, gen_ladders, gen_trace, ChunkLadder, LadderGenConfig, ThroughputTrace,
    TraceGenConfig, TracePattern,
};
use bola_ssim::sim::{Algorithm, SessionConfig};
use bola_ssim::DecisionMode;

pub struct Fixture {
    pub ladders: Vec<ChunkLadder>,
    pub trace: ThroughputTrace,
    pub params: BolaParams,
    pub session: SessionConfig,
}

/// Ten-format corpus with a log-normal trace, calibrated for `version`.
pub fn fixture(version: Version, chunks: usize, seed: u64) -> Fixture {
    let ladders = gen_ladders(&LadderGenConfig::with_formats(10, chunks, 2.0, seed))
        .expect("valid generator config");
    let trace = gen_trace(&TraceGenConfig {
        pattern: TracePattern::LogNormal {
            mean_bytes_per_sec: 5e5,
            sigma: 0.7,
            segment_duration: 5.0,
            segments: 400,
        },
        seed,
    })
    .expect("valid trace config");
    let preset = version.preset();
    let avg = average_ladder(&ladders, preset.utility_kind, 60.0).expect("non-empty corpus");
    let params = calibrate(&avg, &preset.calibration()).expect("generated ladders calibrate");
    let session = SessionConfig::new(
        format!("{version:?}"),
        DecisionMode::Client,
        Algorithm::Bola {
            params,
            negative_policy: preset.negative_policy,
        },
    );
    Fixture {
        ladders,
        trace,
        params,
        session,
    }
}
