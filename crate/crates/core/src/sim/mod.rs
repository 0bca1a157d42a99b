//! Event-exact simulation of one streaming session over a throughput trace.
//!
//! Time is kept in whole nanoseconds ([`Duration`]) so that the wall clock is
//! exactly the sum of startup delay, playback and stalls. Download times come
//! from integrating the trace in floating point and are rounded to the
//! nearest nanosecond.

mod summary;

pub use summary::{compare, summarize, Summary};

use std::time::Duration;

use crate::baseline::{bba_choose, BbaConfig};
use crate::bola::{choose, BolaParams, Decision, DecisionMode, NegativePolicy};
use crate::error::{Error, Result};
use crate::media::{ChunkLadder, Ssim, ThroughputTrace};

/// How many nanoseconds the client backs off below a pause threshold before
/// giving up and forcing a download.
const MAX_PAUSE_NUDGE_NS: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    Bola {
        params: BolaParams,
        negative_policy: NegativePolicy,
    },
    Bba(BbaConfig),
}

impl Algorithm {
    pub fn decide(&self, ladder: &ChunkLadder, q: f64, mode: DecisionMode) -> Decision {
        match self {
            Algorithm::Bola {
                params,
                negative_policy,
            } => choose(params, ladder, q, mode, *negative_policy),
            Algorithm::Bba(cfg) => bba_choose(cfg, ladder, q),
        }
    }

    /// Client-mode stand-in when pausing cannot help (the buffer is already
    /// at or below the pause threshold).
    fn forced(&self, ladder: &ChunkLadder, q: f64) -> Decision {
        match self {
            Algorithm::Bola { params, .. } => choose(
                params,
                ladder,
                q,
                DecisionMode::Server,
                NegativePolicy::ArgmaxObjective,
            ),
            Algorithm::Bba(cfg) => bba_choose(cfg, ladder, q),
        }
    }

    /// Largest buffer level at which a client would download from `ladder`.
    pub fn pause_threshold(&self, ladder: &ChunkLadder) -> Option<f64> {
        match self {
            Algorithm::Bola { params, .. } => {
                let a_max = ladder
                    .encodings()
                    .iter()
                    .map(|e| params.zero_crossing(params.utility(e)))
                    .fold(f64::NEG_INFINITY, f64::max);
                (a_max >= 0.0).then_some(a_max)
            }
            Algorithm::Bba(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    /// Row label in summaries.
    pub name: String,
    pub mode: DecisionMode,
    /// Seconds of video the client can hold.
    pub buffer_capacity: f64,
    pub algorithm: Algorithm,
}

impl SessionConfig {
    pub fn new(name: impl Into<String>, mode: DecisionMode, algorithm: Algorithm) -> Self {
        SessionConfig {
            name: name.into(),
            mode,
            buffer_capacity: 15.0,
            algorithm,
        }
    }
}

/// One downloaded chunk.
#[derive(Clone, Debug, PartialEq)]
pub struct ChunkRecord {
    pub chunk_index: u32,
    pub format_id: u32,
    pub size: u64,
    pub ssim: Ssim,
    /// Buffer level when the sending decision was taken.
    pub buffer_before: Duration,
    /// Buffer level right after the chunk was appended.
    pub buffer_after: Duration,
    pub download_start: Duration,
    pub download_end: Duration,
    pub stall: Duration,
    /// Waiting for room in the buffer.
    pub idle: Duration,
    /// Client-side pause after a NoSend decision.
    pub paused: Duration,
    /// Sent although the client would have paused; see [`Algorithm::forced`].
    pub forced: bool,
}

impl ChunkRecord {
    pub fn download(&self) -> Duration {
        self.download_end - self.download_start
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub algo: String,
    pub records: Vec<ChunkRecord>,
    pub startup_delay: Duration,
    pub play_time: Duration,
    pub stall_time: Duration,
    /// Clock when the last chunk finishes playing.
    pub wall_time: Duration,
}

fn nanos(secs: f64) -> Duration {
    Duration::from_nanos((secs * 1e9).round() as u64)
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

struct Player {
    clock: Duration,
    buffer: Duration,
    playing: bool,
    startup: Duration,
    played: Duration,
    stalled: Duration,
}

impl Player {
    /// Lets `d` of wall time pass without a download in flight.
    fn drain(&mut self, d: Duration) {
        debug_assert!(self.playing && d <= self.buffer);
        self.buffer -= d;
        self.played += d;
        self.clock += d;
    }

    /// Lets `d` of wall time pass while downloading; returns the stall.
    fn download(&mut self, d: Duration) -> Duration {
        let stall = if !self.playing {
            self.startup += d;
            Duration::ZERO
        } else if self.buffer >= d {
            self.buffer -= d;
            self.played += d;
            Duration::ZERO
        } else {
            let stall = d - self.buffer;
            self.played += self.buffer;
            self.stalled += stall;
            self.buffer = Duration::ZERO;
            stall
        };
        self.clock += d;
        stall
    }
}

/// Runs one session to the end of playback. Pure in its inputs.
pub fn simulate(
    cfg: &SessionConfig,
    ladders: &[ChunkLadder],
    trace: &ThroughputTrace,
) -> Result<SimReport> {
    if ladders.is_empty() {
        return Err(Error::NoChunks);
    }
    if !(cfg.buffer_capacity > 0.0 && cfg.buffer_capacity.is_finite()) {
        return Err(Error::config("buffer capacity must be positive"));
    }
    if let Algorithm::Bba(b) = &cfg.algorithm {
        b.validate()?;
    }
    let capacity = nanos(cfg.buffer_capacity);

    let mut p = Player {
        clock: Duration::ZERO,
        buffer: Duration::ZERO,
        playing: false,
        startup: Duration::ZERO,
        played: Duration::ZERO,
        stalled: Duration::ZERO,
    };
    let mut records = Vec::with_capacity(ladders.len());

    for ladder in ladders {
        let chunk = nanos(ladder.duration());
        if chunk > capacity {
            return Err(Error::config(format!(
                "chunk {} ({} s) does not fit a {} s buffer",
                ladder.chunk_index(),
                ladder.duration(),
                cfg.buffer_capacity
            )));
        }

        let mut idle = Duration::ZERO;
        if p.buffer + chunk > capacity {
            idle = p.buffer + chunk - capacity;
            p.drain(idle);
        }

        let mut paused = Duration::ZERO;
        let mut forced = false;
        let format_id = loop {
            let q = secs(p.buffer);
            match cfg.algorithm.decide(ladder, q, cfg.mode) {
                Decision::Send(id) => break id,
                Decision::NoSend => match pause_target(cfg, ladder).filter(|t| *t < p.buffer) {
                    Some(target) => {
                        let wait = p.buffer - target;
                        paused += wait;
                        p.drain(wait);
                    }
                    None => {
                        forced = true;
                        let d = cfg.algorithm.forced(ladder, q);
                        break d.format_id().expect("server-mode choices always send");
                    }
                },
            }
        };

        let enc = ladder
            .get(format_id)
            .expect("decisions reference formats of the ladder");
        let buffer_before = p.buffer;
        let start = p.clock;
        let took = nanos(trace.download_time(secs(start), enc.size as f64));
        let stall = p.download(took);
        p.buffer += chunk;
        p.playing = true;

        records.push(ChunkRecord {
            chunk_index: ladder.chunk_index(),
            format_id,
            size: enc.size,
            ssim: enc.ssim,
            buffer_before,
            buffer_after: p.buffer,
            download_start: start,
            download_end: p.clock,
            stall,
            idle,
            paused,
            forced,
        });
    }

    // play out what is left
    let rest = p.buffer;
    p.drain(rest);

    Ok(SimReport {
        algo: cfg.name.clone(),
        records,
        startup_delay: p.startup,
        play_time: p.played,
        stall_time: p.stalled,
        wall_time: p.clock,
    })
}

/// Latest buffer level (whole ns) at which the client would send again.
fn pause_target(cfg: &SessionConfig, ladder: &ChunkLadder) -> Option<Duration> {
    let threshold = cfg.algorithm.pause_threshold(ladder)?;
    let mut t = Duration::from_nanos((threshold * 1e9).floor() as u64);
    for _ in 0..MAX_PAUSE_NUDGE_NS {
        if cfg.algorithm.decide(ladder, secs(t), cfg.mode) != Decision::NoSend {
            return Some(t);
        }
        t = t.checked_sub(Duration::from_nanos(1))?;
    }
    None
}
