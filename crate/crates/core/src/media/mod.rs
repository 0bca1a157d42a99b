//! Encodings, ladders, traces and SSIM conversion.

mod gen;
mod ladder;
mod quality;
mod trace;

pub use gen::{gen_ladders, gen_trace, LadderGenConfig, TraceGenConfig, TracePattern};
pub use ladder::{
    average_ladder, validate_ladder, AverageLadder, ChunkLadder, Encoding, LadderCandidate,
    LadderPolicy, DEFAULT_CHUNK_DURATION,
};
pub use quality::{db_to_ssim, ssim_to_db, Ssim, SsimDb, UtilityKind, DEFAULT_DB_CAP};
pub use trace::{ThroughputTrace, TraceSegment};
