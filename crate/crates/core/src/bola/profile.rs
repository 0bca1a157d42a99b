//! Buffer levels at which the decision for one ladder changes.
//!
//! Each encoding is the decreasing line `f_m(Q) = (A_m - Q) / S_m` with
//! `A_m = V (v_m + γp)`. The chosen encoding is the upper envelope of those
//! lines while it is nonnegative; past `max_m A_m` nothing is sent. Slopes are
//! `-1/S_m`, so along increasing `Q` the envelope only ever moves to larger
//! encodings.

use serde::{Deserialize, Serialize};

use crate::bola::choose::{candidates, choose, Candidate, Decision, DecisionMode};
use crate::bola::params::{BolaParams, NegativePolicy};
use crate::media::ChunkLadder;

/// `[lo, hi)` in seconds of buffer. The last send segment also owns its
/// upper endpoint, where the objective is exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub decision: Decision,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub buffer_s: f64,
    pub from_format: u32,
    /// `None` when the decision becomes NoSend.
    pub to_format: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdProfile {
    segments: Vec<Segment>,
    boundaries: Vec<Boundary>,
}

impl ThresholdProfile {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }

    /// Buffer level past which nothing is sent, if anything is ever sent.
    pub fn pause_threshold(&self) -> Option<f64> {
        self.boundaries
            .last()
            .filter(|b| b.to_format.is_none())
            .map(|b| b.buffer_s)
    }

    pub fn decision_at(&self, q: f64) -> Decision {
        let n = self.segments.len();
        for (i, seg) in self.segments.iter().enumerate() {
            let closes_send = i + 1 < n && self.segments[i + 1].decision == Decision::NoSend;
            if q < seg.hi || (closes_send && q == seg.hi) {
                return seg.decision;
            }
        }
        self.segments[n - 1].decision
    }
}

fn crossover(c: &Candidate, j: &Candidate, a_c: f64, a_j: f64) -> f64 {
    // f_c(q) = f_j(q)  ⇔  q = (S_j A_c - S_c A_j) / (S_j - S_c)
    (j.size * a_c - c.size * a_j) / (j.size - c.size)
}

/// Computes the decision profile of `ladder` over `[0, ∞)`, including
/// boundaries above the configured maximum buffer.
pub fn threshold_profile(params: &BolaParams, ladder: &ChunkLadder) -> ThresholdProfile {
    let lines: Vec<(Candidate, f64)> = candidates(params, ladder)
        .map(|c| (c, params.zero_crossing(c.utility)))
        .collect();
    let a_max = lines.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);

    let mut segments = Vec::new();
    let mut boundaries: Vec<Boundary> = Vec::new();
    if a_max < 0.0 {
        segments.push(Segment {
            lo: 0.0,
            hi: f64::INFINITY,
            decision: Decision::NoSend,
        });
        return ThresholdProfile {
            segments,
            boundaries,
        };
    }

    // winner at q = 0; ladders are sorted by size so later indices win ties
    let mut cur = 0;
    for (i, (c, a)) in lines.iter().enumerate() {
        let (b, b_a) = &lines[cur];
        if a / c.size >= b_a / b.size {
            cur = i;
        }
    }

    let mut lo = 0.0;
    loop {
        let (c, a_c) = lines[cur];
        let mut next: Option<(f64, usize)> = None;
        for (j, (cj, a_j)) in lines.iter().enumerate().skip(cur + 1) {
            let q = crossover(&c, cj, a_c, *a_j);
            if q >= a_c {
                continue;
            }
            let q = q.max(lo);
            if next.is_none_or(|(best, _)| q <= best) {
                next = Some((q, j));
            }
        }

        match next {
            Some((q, j)) => {
                if q > lo {
                    segments.push(Segment {
                        lo,
                        hi: q,
                        decision: Decision::Send(c.format_id),
                    });
                    boundaries.push(Boundary {
                        buffer_s: q,
                        from_format: c.format_id,
                        to_format: Some(lines[j].0.format_id),
                    });
                    lo = q;
                } else if let Some(last) = boundaries.last_mut().filter(|b| b.buffer_s == lo) {
                    last.to_format = Some(lines[j].0.format_id);
                }
                cur = j;
            }
            None => {
                if a_c > lo {
                    segments.push(Segment {
                        lo,
                        hi: a_c,
                        decision: Decision::Send(c.format_id),
                    });
                }
                boundaries.push(Boundary {
                    buffer_s: a_c,
                    from_format: c.format_id,
                    to_format: None,
                });
                segments.push(Segment {
                    lo: a_c,
                    hi: f64::INFINITY,
                    decision: Decision::NoSend,
                });
                break;
            }
        }
    }

    ThresholdProfile {
        segments,
        boundaries,
    }
}

/// Brute-force reference for [`threshold_profile`]: client-mode decisions on
/// the grid `0, step, 2·step, …, ≤ q_max`.
pub fn decision_sweep_oracle(
    params: &BolaParams,
    ladder: &ChunkLadder,
    q_max: f64,
    step: f64,
) -> Vec<(f64, Decision)> {
    assert!(step > 0.0, "sweep step must be positive");
    let n = (q_max / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| {
            let q = i as f64 * step;
            // the policy is irrelevant in client mode
            let d = choose(
                params,
                ladder,
                q,
                DecisionMode::Client,
                NegativePolicy::ArgmaxObjective,
            );
            (q, d)
        })
        .collect()
}

/// Grid points where the oracle's decision changes, as `(q, before, after)`.
pub fn sweep_changes(sweep: &[(f64, Decision)]) -> Vec<(f64, Decision, Decision)> {
    sweep
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[1].0, w[0].1, w[1].1))
        .collect()
}
