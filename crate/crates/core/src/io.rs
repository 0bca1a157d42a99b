//! CSV and JSON formats.
//!
//! | file        | layout |
//! |-------------|--------|
//! | ladders     | `chunk_index,format_id,size_bytes,ssim` |
//! | trace       | `time_s,bytes_per_sec` |
//! | thresholds  | `chunk_index,boundary_index,buffer_s,from_format,to_format,hypothetical` |
//! | decisions   | `chunk_index,format_id,buffer_before_s,download_s,stall_s` |
//! | comparison  | one [`Summary`] per row |
//! | params      | JSON, see [`ParamsFile`] |
//! | summary     | JSON, see [`Summary`] |
//!
//! Floats are written in shortest round-trip form, so parsing an emitted file
//! yields bit-identical values. Output is LF-terminated UTF-8.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bola::{BolaParams, CalibrationConfig, NegativePolicy, ThresholdProfile, TopUtility};
use crate::error::{Error, Result};
use crate::media::{
    validate_ladder, ChunkLadder, Encoding, LadderCandidate, LadderPolicy, Ssim, ThroughputTrace,
    TraceSegment, UtilityKind, DEFAULT_DB_CAP,
};
use crate::sim::{SimReport, Summary};

pub const LADDER_HEADER: [&str; 4] = ["chunk_index", "format_id", "size_bytes", "ssim"];
pub const TRACE_HEADER: [&str; 2] = ["time_s", "bytes_per_sec"];

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn reader<R: Read>(r: R, expected: &[&str]) -> Result<(csv::Reader<R>, csv::StringRecord)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", expected.join(",")),
        });
    }
    Ok((rdr, headers))
}

fn rows<R: Read, T: for<'de> Deserialize<'de>>(r: R, expected: &[&str]) -> Result<Vec<(u64, T)>> {
    let (mut rdr, headers) = reader(r, expected)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec.deserialize(Some(&headers)).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        out.push((line, row));
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct LadderRow {
    chunk_index: u32,
    format_id: u32,
    size_bytes: u64,
    ssim: f64,
}

pub fn write_ladders<W: Write>(w: W, ladders: &[ChunkLadder]) -> Result<()> {
    let mut wtr = writer(w);
    for l in ladders {
        for e in l.encodings() {
            wtr.serialize(LadderRow {
                chunk_index: l.chunk_index(),
                format_id: e.format_id,
                size_bytes: e.size,
                ssim: e.ssim.value(),
            })?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads ladders grouped by `chunk_index`. Every chunk gets `duration`
/// seconds. Errors name the offending line.
pub fn read_ladders<R: Read>(
    r: R,
    duration: f64,
    policy: LadderPolicy,
) -> Result<Vec<ChunkLadder>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<(u64, LadderCandidate)> = None;

    let finish = |(line, c): (u64, LadderCandidate)| {
        validate_ladder(c, policy).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })
    };

    for (line, row) in rows::<_, LadderRow>(r, &LADDER_HEADER)? {
        let ssim = Ssim::new(row.ssim).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let enc = Encoding {
            format_id: row.format_id,
            size: row.size_bytes,
            ssim,
        };
        match &mut current {
            Some((_, c)) if c.chunk_index == row.chunk_index => c.encodings.push(enc),
            _ => {
                if !seen.insert(row.chunk_index) {
                    return Err(Error::Parse {
                        line,
                        message: format!("rows for chunk {} are not contiguous", row.chunk_index),
                    });
                }
                if let Some(done) = current.take() {
                    out.push(finish(done)?);
                }
                current = Some((
                    line,
                    LadderCandidate {
                        chunk_index: row.chunk_index,
                        duration,
                        encodings: vec![enc],
                    },
                ));
            }
        }
    }
    if let Some(done) = current {
        out.push(finish(done)?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no ladder rows".into(),
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    time_s: f64,
    bytes_per_sec: f64,
}

pub fn write_trace<W: Write>(w: W, trace: &ThroughputTrace) -> Result<()> {
    let mut wtr = writer(w);
    for s in trace.segments() {
        wtr.serialize(TraceRow {
            time_s: s.start,
            bytes_per_sec: s.bytes_per_sec,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(r: R) -> Result<ThroughputTrace> {
    let rows = rows::<_, TraceRow>(r, &TRACE_HEADER)?;
    let lines: Vec<u64> = rows.iter().map(|(l, _)| *l).collect();
    let segments = rows
        .into_iter()
        .map(|(_, r)| TraceSegment {
            start: r.time_s,
            bytes_per_sec: r.bytes_per_sec,
        })
        .collect();
    ThroughputTrace::new(segments).map_err(|e| match e {
        Error::InvalidTraceSegment { index, .. } => Error::Parse {
            line: lines[index],
            message: e.to_string(),
        },
        other => other,
    })
}

/// On-disk form of calibrated parameters plus the negative-objective policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub v_coef_s_per_utility: f64,
    pub gamma_p_utility: f64,
    pub utility_kind: UtilityKind,
    pub min_buffer_s: f64,
    pub max_buffer_s: f64,
    pub chunk_duration_s: f64,
    pub top_utility: TopUtility,
    pub negative_policy: NegativePolicy,
    /// Only written when it differs from the 60 dB default.
    #[serde(default = "default_cap", skip_serializing_if = "is_default_cap")]
    pub db_cap_db: f64,
}

fn default_cap() -> f64 {
    DEFAULT_DB_CAP
}

fn is_default_cap(c: &f64) -> bool {
    *c == DEFAULT_DB_CAP
}

impl ParamsFile {
    pub fn new(params: &BolaParams, negative_policy: NegativePolicy) -> Self {
        let c = params.calibration();
        ParamsFile {
            v_coef_s_per_utility: params.v_coef(),
            gamma_p_utility: params.gamma_p(),
            utility_kind: c.utility_kind,
            min_buffer_s: c.min_buffer,
            max_buffer_s: c.max_buffer,
            chunk_duration_s: c.chunk_duration,
            top_utility: c.top_utility,
            negative_policy,
            db_cap_db: c.db_cap,
        }
    }

    pub fn into_parts(self) -> Result<(BolaParams, NegativePolicy)> {
        let calibration = CalibrationConfig {
            min_buffer: self.min_buffer_s,
            max_buffer: self.max_buffer_s,
            chunk_duration: self.chunk_duration_s,
            utility_kind: self.utility_kind,
            top_utility: self.top_utility,
            db_cap: self.db_cap_db,
        };
        let params = BolaParams::new(self.v_coef_s_per_utility, self.gamma_p_utility, calibration)?;
        Ok((params, self.negative_policy))
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_params<W: Write>(mut w: W, params: &BolaParams, policy: NegativePolicy) -> Result<()> {
    w.write_all(to_json(&ParamsFile::new(params, policy))?.as_bytes())?;
    Ok(())
}

pub fn read_params<R: Read>(r: R) -> Result<(BolaParams, NegativePolicy)> {
    let file: ParamsFile = serde_json::from_reader(r)?;
    file.into_parts()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub chunk_index: u32,
    pub boundary_index: usize,
    pub buffer_s: f64,
    pub from_format: u32,
    /// Empty means NoSend.
    pub to_format: Option<u32>,
    /// Above the maximum buffer, so never exercised.
    pub hypothetical: bool,
}

pub fn threshold_rows(
    chunk_index: u32,
    profile: &ThresholdProfile,
    max_buffer: f64,
) -> Vec<ThresholdRow> {
    profile
        .boundaries()
        .iter()
        .enumerate()
        .map(|(i, b)| ThresholdRow {
            chunk_index,
            boundary_index: i,
            buffer_s: b.buffer_s,
            from_format: b.from_format,
            to_format: b.to_format,
            hypothetical: b.buffer_s > max_buffer,
        })
        .collect()
}

pub const THRESHOLD_HEADER: [&str; 6] = [
    "chunk_index",
    "boundary_index",
    "buffer_s",
    "from_format",
    "to_format",
    "hypothetical",
];

fn write_rows<W: Write, T: Serialize>(w: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_writer(w);
    wtr.write_record(header)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_thresholds<W: Write>(w: W, rows: &[ThresholdRow]) -> Result<()> {
    write_rows(w, &THRESHOLD_HEADER, rows)
}

pub fn read_thresholds<R: Read>(r: R) -> Result<Vec<ThresholdRow>> {
    Ok(rows(r, &THRESHOLD_HEADER)?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub chunk_index: u32,
    pub format_id: u32,
    pub buffer_before_s: f64,
    pub download_s: f64,
    pub stall_s: f64,
}

pub const DECISION_HEADER: [&str; 5] = [
    "chunk_index",
    "format_id",
    "buffer_before_s",
    "download_s",
    "stall_s",
];

pub fn decision_rows(report: &SimReport) -> Vec<DecisionRow> {
    report
        .records
        .iter()
        .map(|r| DecisionRow {
            chunk_index: r.chunk_index,
            format_id: r.format_id,
            buffer_before_s: r.buffer_before.as_secs_f64(),
            download_s: r.download().as_secs_f64(),
            stall_s: r.stall.as_secs_f64(),
        })
        .collect()
}

pub fn write_decisions<W: Write>(w: W, rows: &[DecisionRow]) -> Result<()> {
    write_rows(w, &DECISION_HEADER, rows)
}

pub fn read_decisions<R: Read>(r: R) -> Result<Vec<DecisionRow>> {
    Ok(rows(r, &DECISION_HEADER)?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

pub const TABLE_HEADER: [&str; 8] = [
    "algo",
    "chunks",
    "mean_ssim_db",
    "stall_ratio",
    "mean_abs_ssim_db_delta",
    "startup_delay_s",
    "play_time_s",
    "stall_time_s",
];

pub fn write_table<W: Write>(w: W, rows: &[Summary]) -> Result<()> {
    write_rows(w, &TABLE_HEADER, rows)
}

pub fn read_table<R: Read>(r: R) -> Result<Vec<Summary>> {
    Ok(rows(r, &TABLE_HEADER)?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}
