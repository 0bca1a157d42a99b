use std::path::PathBuf;

use bola_ssim::{DecisionMode, NegativePolicy, TopUtility, UtilityKind, Version};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// BOLA-BASIC with SSIM utility: calibration, decision thresholds and
/// trace-driven simulation.
#[derive(Debug, Parser)]
#[command(name = "bola-ssim", version)]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate V and γp from a ladder corpus.
    Calibrate(CalibrateArgs),
    /// Per-chunk decision thresholds, including ones past the maximum buffer.
    Thresholds(ThresholdsArgs),
    /// Decision for one chunk at one buffer level.
    Decide(DecideArgs),
    /// Simulate one session over a throughput trace.
    Simulate(SimulateArgs),
    /// Simulate several algorithms on the same inputs.
    Compare(CompareArgs),
    /// Generate a seeded synthetic ladder corpus.
    GenLadders(GenLaddersArgs),
    /// Generate a seeded throughput trace.
    GenTrace(GenTraceArgs),
}

#[derive(Debug, Args)]
pub struct LadderInput {
    /// Ladder CSV: chunk_index,format_id,size_bytes,ssim.
    #[arg(long)]
    pub ladders: PathBuf,

    /// Drop encodings whose SSIM is below that of a smaller one instead of
    /// rejecting the file.
    #[arg(long)]
    pub drop_dominated: bool,
}

/// Per-toggle overrides on top of a version preset.
#[derive(Debug, Args, Default, Clone)]
pub struct Overrides {
    /// Utility: ssim_raw or ssim_db.
    #[arg(long)]
    pub utility: Option<UtilityKind>,

    /// Top anchor: max_average, or a number (max_possible).
    #[arg(long)]
    pub top_utility: Option<TopUtility>,

    /// Server fallback when all objectives are negative: argmax_objective or
    /// argmax_utility.
    #[arg(long)]
    pub negative_policy: Option<NegativePolicy>,
}

#[derive(Debug, Args, Clone)]
pub struct Calibration {
    #[arg(long, default_value_t = 3.0)]
    pub min_buf: f64,

    #[arg(long, default_value_t = 15.0)]
    pub max_buf: f64,

    /// Seconds per chunk.
    #[arg(long, default_value_t = 2.002)]
    pub chunk_duration: f64,

    /// Ceiling for SSIM dB values.
    #[arg(long, default_value_t = 60.0)]
    pub db_cap: f64,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub input: LadderInput,

    #[arg(long)]
    pub version: Version,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(flatten)]
    pub calibration: Calibration,

    /// Params JSON output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    #[command(flatten)]
    pub input: LadderInput,

    /// Params JSON from `calibrate`.
    #[arg(long)]
    pub params: PathBuf,

    /// Thresholds CSV output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[command(flatten)]
    pub input: LadderInput,

    #[arg(long)]
    pub params: PathBuf,

    /// Chunk index.
    #[arg(long)]
    pub chunk: u32,

    /// Buffer level in seconds.
    #[arg(long)]
    pub buffer: f64,

    #[arg(long, default_value = "client")]
    pub mode: DecisionMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoName {
    #[value(name = "bola-v1")]
    BolaV1,
    #[value(name = "bola-v2")]
    BolaV2,
    Bba,
}

#[derive(Debug, Args)]
pub struct Session {
    #[command(flatten)]
    pub input: LadderInput,

    /// Trace CSV: time_s,bytes_per_sec.
    #[arg(long)]
    pub trace: PathBuf,

    #[arg(long, default_value = "client")]
    pub mode: DecisionMode,

    /// Seconds of video the client can hold.
    #[arg(long, default_value_t = 15.0)]
    pub buffer_capacity: f64,

    /// Use these BOLA params instead of calibrating on the ladders.
    #[arg(long, conflicts_with_all = ["utility", "top_utility"])]
    pub params: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(flatten)]
    pub calibration: Calibration,

    /// BBA reservoir in seconds.
    #[arg(long, default_value_t = 3.0)]
    pub reservoir: f64,

    /// BBA cushion in seconds.
    #[arg(long, default_value_t = 15.0)]
    pub cushion: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub session: Session,

    #[arg(long, value_enum)]
    pub algo: AlgoName,

    /// Summary JSON output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Per-chunk decisions CSV.
    #[arg(long)]
    pub decisions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub session: Session,

    /// Comma-separated algorithms.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub algos: Vec<AlgoName>,

    /// Comparison CSV output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenLaddersArgs {
    #[arg(long)]
    pub seed: u64,

    #[arg(long, default_value_t = 10)]
    pub formats: usize,

    #[arg(long, default_value_t = 200)]
    pub chunks: usize,

    /// Per-chunk quality spread in dB.
    #[arg(long, default_value_t = 2.0)]
    pub volatility: f64,

    /// Ladder CSV output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PatternName {
    Constant,
    Square,
    Lognormal,
}

#[derive(Debug, Args)]
pub struct GenTraceArgs {
    #[arg(long)]
    pub seed: u64,

    #[arg(long, value_enum, default_value = "lognormal")]
    pub pattern: PatternName,

    /// Mean (lognormal) or constant bandwidth, bytes/s.
    #[arg(long, default_value_t = 500_000.0)]
    pub mean: f64,

    /// Square wave low level, bytes/s.
    #[arg(long, default_value_t = 100_000.0)]
    pub low: f64,

    /// Square wave high level, bytes/s.
    #[arg(long, default_value_t = 1_000_000.0)]
    pub high: f64,

    /// Seconds per segment (square wave half-period or lognormal step).
    #[arg(long, default_value_t = 5.0)]
    pub period: f64,

    #[arg(long, default_value_t = 200)]
    pub segments: usize,

    /// Log-space standard deviation for lognormal traces.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,

    /// Trace CSV output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
