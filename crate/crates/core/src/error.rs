use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while ingesting, calibrating or simulating.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ssim {0} outside (0, 1]")]
    InvalidSsim(f64),

    #[error("ssim dB value {value} outside (0, {cap}]")]
    InvalidSsimDb { value: f64, cap: f64 },

    #[error("dB cap must be positive and finite, got {0}")]
    InvalidDbCap(f64),

    #[error("chunk {chunk}: ladder has no encodings")]
    EmptyLadder { chunk: u32 },

    #[error("chunk {chunk}: format {format} has zero size")]
    ZeroSize { chunk: u32, format: u32 },

    #[error("chunk {chunk}: duplicate size {size} bytes")]
    DuplicateSize { chunk: u32, size: u64 },

    #[error("chunk {chunk}: format {format} has lower ssim than a smaller encoding")]
    NotMonotone { chunk: u32, format: u32 },

    #[error("chunk {chunk}: duration {duration} s is not positive")]
    InvalidDuration { chunk: u32, duration: f64 },

    #[error("chunk {chunk}: expected {expected} formats, found {found}")]
    InconsistentFormatCount {
        chunk: u32,
        expected: usize,
        found: usize,
    },

    #[error("average ladder violates monotonicity at format position {position}")]
    AverageNotMonotone { position: usize },

    #[error("calibration needs at least 2 formats, got {0}")]
    TooFewFormats(usize),

    #[error("top utility {top} does not exceed first-crossover intercept {intercept}; no positive V exists")]
    NoPositiveV { top: f64, intercept: f64 },

    #[error("average format position {position} never appears on the objective envelope")]
    OffEnvelope { position: usize },

    #[error("average ladder utility kind {found:?} does not match calibration kind {expected:?}")]
    UtilityKindMismatch {
        expected: crate::UtilityKind,
        found: crate::UtilityKind,
    },

    #[error("trace has no segments")]
    EmptyTrace,

    #[error("trace segment {index}: {reason}")]
    InvalidTraceSegment { index: usize, reason: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("simulation needs at least one chunk")]
    NoChunks,

    #[error("report contains no played chunks")]
    NoPlayedChunks,

    #[error("chunk {0} not found")]
    UnknownChunk(u32),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
