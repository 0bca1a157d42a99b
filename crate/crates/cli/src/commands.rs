use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use bola_ssim::io as files;
use bola_ssim::media::{LadderGenConfig, TraceGenConfig, TracePattern};
use bola_ssim::{
    average_ladder, calibrate, choose, compare, gen_ladders, gen_trace, simulate, summarize,
    threshold_profile, Algorithm, BbaConfig, BolaParams, CalibrationConfig, ChunkLadder,
    LadderPolicy, NegativePolicy, SessionConfig, Summary, ThroughputTrace, Version,
};

use crate::args::*;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Calibrate(a) => run_calibrate(a),
        Command::Thresholds(a) => run_thresholds(a),
        Command::Decide(a) => run_decide(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Compare(a) => run_compare(a),
        Command::GenLadders(a) => run_gen_ladders(a),
        Command::GenTrace(a) => run_gen_trace(a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Writes to `path`, or to stdout when there is none.
fn emit<F>(path: Option<&Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> bola_ssim::Result<()>,
{
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(f);
            write(&mut w).with_context(|| format!("writing {}", p.display()))?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn read_ladders(input: &LadderInput, duration: f64) -> Result<Vec<ChunkLadder>> {
    let policy = if input.drop_dominated {
        LadderPolicy::DropDominated
    } else {
        LadderPolicy::Reject
    };
    files::read_ladders(open(&input.ladders)?, duration, policy)
        .with_context(|| format!("reading {}", input.ladders.display()))
}

fn read_params(path: &Path) -> Result<(BolaParams, NegativePolicy)> {
    files::read_params(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn read_trace(path: &Path) -> Result<ThroughputTrace> {
    files::read_trace(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn calibration_config(version: Version, o: &Overrides, c: &Calibration) -> CalibrationConfig {
    let preset = version.preset();
    CalibrationConfig {
        min_buffer: c.min_buf,
        max_buffer: c.max_buf,
        chunk_duration: c.chunk_duration,
        utility_kind: o.utility.unwrap_or(preset.utility_kind),
        top_utility: o.top_utility.unwrap_or(preset.top_utility),
        db_cap: c.db_cap,
    }
}

fn calibrate_on(ladders: &[ChunkLadder], cfg: &CalibrationConfig) -> Result<BolaParams> {
    let avg = average_ladder(ladders, cfg.utility_kind, cfg.db_cap)?;
    Ok(calibrate(&avg, cfg)?)
}

fn run_calibrate(a: CalibrateArgs) -> Result<()> {
    let ladders = read_ladders(&a.input, a.calibration.chunk_duration)?;
    let cfg = calibration_config(a.version, &a.overrides, &a.calibration);
    let policy = a
        .overrides
        .negative_policy
        .unwrap_or(a.version.preset().negative_policy);
    let params = calibrate_on(&ladders, &cfg)?;
    emit(a.output.as_deref(), |w| {
        files::write_params(w, &params, policy)
    })?;
    if a.output.is_some() {
        println!(
            "V = {} s/utility, gamma_p = {} ({} chunks, {})",
            params.v_coef(),
            params.gamma_p(),
            ladders.len(),
            cfg.utility_kind
        );
    }
    Ok(())
}

fn run_thresholds(a: ThresholdsArgs) -> Result<()> {
    let (params, _) = read_params(&a.params)?;
    let cal = *params.calibration();
    let ladders = read_ladders(&a.input, cal.chunk_duration)?;
    let rows: Vec<files::ThresholdRow> = ladders
        .iter()
        .flat_map(|l| {
            files::threshold_rows(
                l.chunk_index(),
                &threshold_profile(&params, l),
                cal.max_buffer,
            )
        })
        .collect();
    emit(a.output.as_deref(), |w| files::write_thresholds(w, &rows))?;
    if a.output.is_some() {
        let hypothetical = rows.iter().filter(|r| r.hypothetical).count();
        println!(
            "{} boundaries over {} chunks, {} above the {} s maximum buffer",
            rows.len(),
            ladders.len(),
            hypothetical,
            cal.max_buffer
        );
    }
    Ok(())
}

fn run_decide(a: DecideArgs) -> Result<()> {
    let (params, policy) = read_params(&a.params)?;
    let ladders = read_ladders(&a.input, params.calibration().chunk_duration)?;
    let ladder = ladders
        .iter()
        .find(|l| l.chunk_index() == a.chunk)
        .ok_or(bola_ssim::Error::UnknownChunk(a.chunk))?;
    if !(a.buffer >= 0.0 && a.buffer.is_finite()) {
        bail!(
            "buffer must be a nonnegative number of seconds, got {}",
            a.buffer
        );
    }
    println!("{}", choose(&params, ladder, a.buffer, a.mode, policy));
    Ok(())
}

fn session_config(algo: AlgoName, s: &Session, ladders: &[ChunkLadder]) -> Result<SessionConfig> {
    let (name, version) = match algo {
        AlgoName::Bba => {
            let bba = BbaConfig::new(s.reservoir, s.cushion)?;
            let mut cfg = SessionConfig::new("bba", s.mode, Algorithm::Bba(bba));
            cfg.buffer_capacity = s.buffer_capacity;
            return Ok(cfg);
        }
        AlgoName::BolaV1 => ("bola-v1", Version::V1),
        AlgoName::BolaV2 => ("bola-v2", Version::V2),
    };
    let (params, policy) = match &s.params {
        Some(path) => read_params(path)?,
        None => {
            let cfg = calibration_config(version, &s.overrides, &s.calibration);
            let params = calibrate_on(ladders, &cfg)
                .with_context(|| format!("calibrating {name} on the ladders"))?;
            (params, version.preset().negative_policy)
        }
    };
    let negative_policy = s.overrides.negative_policy.unwrap_or(policy);
    let mut cfg = SessionConfig::new(
        name,
        s.mode,
        Algorithm::Bola {
            params,
            negative_policy,
        },
    );
    cfg.buffer_capacity = s.buffer_capacity;
    Ok(cfg)
}

fn print_summary(s: &Summary) {
    println!(
        "{}: {} chunks, mean SSIM {:.3} dB, stall ratio {:.4}, mean |dSSIM| {:.3} dB, startup {:.3} s",
        s.algo, s.chunks, s.mean_ssim_db, s.stall_ratio, s.mean_abs_ssim_db_delta, s.startup_delay_s
    );
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    let s = &a.session;
    let ladders = read_ladders(&s.input, s.calibration.chunk_duration)?;
    let trace = read_trace(&s.trace)?;
    let cfg = session_config(a.algo, s, &ladders)?;
    let report = simulate(&cfg, &ladders, &trace)?;
    let summary = summarize(&report)?;
    if let Some(path) = &a.decisions {
        let rows = files::decision_rows(&report);
        emit(Some(path), |w| files::write_decisions(w, &rows))?;
    }
    emit(a.output.as_deref(), |w| {
        w.write_all(files::to_json(&summary)?.as_bytes())?;
        Ok(())
    })?;
    if a.output.is_some() {
        print_summary(&summary);
    }
    Ok(())
}

fn run_compare(a: CompareArgs) -> Result<()> {
    let s = &a.session;
    let bola = a.algos.iter().filter(|x| **x != AlgoName::Bba).count();
    if s.params.is_some() && bola > 1 {
        bail!("--params can only be used with a single BOLA algorithm");
    }
    let ladders = read_ladders(&s.input, s.calibration.chunk_duration)?;
    let trace = read_trace(&s.trace)?;
    let configs = a
        .algos
        .iter()
        .map(|algo| session_config(*algo, s, &ladders))
        .collect::<Result<Vec<_>>>()?;
    let rows = compare(&configs, &ladders, &trace)?;
    emit(a.output.as_deref(), |w| files::write_table(w, &rows))?;
    if a.output.is_some() {
        rows.iter().for_each(print_summary);
    }
    Ok(())
}

fn run_gen_ladders(a: GenLaddersArgs) -> Result<()> {
    let cfg = LadderGenConfig::with_formats(a.formats, a.chunks, a.volatility, a.seed);
    let ladders = gen_ladders(&cfg)?;
    emit(a.output.as_deref(), |w| files::write_ladders(w, &ladders))?;
    if a.output.is_some() {
        println!(
            "{} chunks x {} formats, seed {}",
            a.chunks, a.formats, a.seed
        );
    }
    Ok(())
}

fn run_gen_trace(a: GenTraceArgs) -> Result<()> {
    let pattern = match a.pattern {
        PatternName::Constant => TracePattern::Constant {
            bytes_per_sec: a.mean,
        },
        PatternName::Square => TracePattern::SquareWave {
            low: a.low,
            high: a.high,
            period: a.period,
            segments: a.segments,
        },
        PatternName::Lognormal => TracePattern::LogNormal {
            mean_bytes_per_sec: a.mean,
            sigma: a.sigma,
            segment_duration: a.period,
            segments: a.segments,
        },
    };
    let trace = gen_trace(&TraceGenConfig {
        pattern,
        seed: a.seed,
    })?;
    emit(a.output.as_deref(), |w| files::write_trace(w, &trace))?;
    if a.output.is_some() {
        println!("{} segments, seed {}", trace.segments().len(), a.seed);
    }
    Ok(())
}
