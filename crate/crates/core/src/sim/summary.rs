use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{ssim_to_db, ChunkLadder, ThroughputTrace, DEFAULT_DB_CAP};
use crate::sim::{simulate, SessionConfig, SimReport};

/// Aggregate quality and stall metrics of one session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algo: String,
    pub chunks: usize,
    pub mean_ssim_db: f64,
    pub stall_ratio: f64,
    pub mean_abs_ssim_db_delta: f64,
    pub startup_delay_s: f64,
    pub play_time_s: f64,
    pub stall_time_s: f64,
}

pub fn summarize(report: &SimReport) -> Result<Summary> {
    if report.records.is_empty() {
        return Err(Error::NoPlayedChunks);
    }
    let db: Vec<f64> = report
        .records
        .iter()
        .map(|r| ssim_to_db(r.ssim, DEFAULT_DB_CAP).map(|d| d.value()))
        .collect::<Result<_>>()?;
    let n = db.len() as f64;
    let mean_ssim_db = db.iter().sum::<f64>() / n;
    let mean_abs_ssim_db_delta = if db.len() < 2 {
        0.0
    } else {
        db.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (n - 1.0)
    };

    let play = report.play_time.as_secs_f64();
    let stall = report.stall_time.as_secs_f64();
    let stall_ratio = if stall > 0.0 {
        stall / (stall + play)
    } else {
        0.0
    };

    Ok(Summary {
        algo: report.algo.clone(),
        chunks: report.records.len(),
        mean_ssim_db,
        stall_ratio,
        mean_abs_ssim_db_delta,
        startup_delay_s: report.startup_delay.as_secs_f64(),
        play_time_s: play,
        stall_time_s: stall,
    })
}

/// Simulates every configuration on the same inputs, one thread each, and
/// returns one summary per configuration in input order.
pub fn compare(
    configs: &[SessionConfig],
    ladders: &[ChunkLadder],
    trace: &ThroughputTrace,
) -> Result<Vec<Summary>> {
    if configs.is_empty() {
        return Err(Error::config("compare needs at least one configuration"));
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| scope.spawn(move || summarize(&simulate(cfg, ladders, trace)?)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}
