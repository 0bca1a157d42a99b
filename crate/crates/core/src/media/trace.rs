use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSegment {
    /// Seconds from session start.
    pub start: f64,
    pub bytes_per_sec: f64,
}

/// Piecewise-constant bandwidth; the last segment never ends.
#[derive(Clone, Debug, PartialEq)]
pub struct ThroughputTrace {
    segments: Vec<TraceSegment>,
}

impl ThroughputTrace {
    pub fn new(segments: Vec<TraceSegment>) -> Result<Self> {
        let first = segments.first().ok_or(Error::EmptyTrace)?;
        if first.start != 0.0 {
            return Err(Error::InvalidTraceSegment {
                index: 0,
                reason: "first segment must start at 0",
            });
        }
        for (index, seg) in segments.iter().enumerate() {
            if !(seg.bytes_per_sec > 0.0 && seg.bytes_per_sec.is_finite()) {
                return Err(Error::InvalidTraceSegment {
                    index,
                    reason: "bandwidth must be positive and finite",
                });
            }
            if !seg.start.is_finite() || (index > 0 && seg.start <= segments[index - 1].start) {
                return Err(Error::InvalidTraceSegment {
                    index,
                    reason: "start times must be finite and strictly increasing",
                });
            }
        }
        Ok(ThroughputTrace { segments })
    }

    pub fn constant(bytes_per_sec: f64) -> Result<Self> {
        ThroughputTrace::new(vec![TraceSegment {
            start: 0.0,
            bytes_per_sec,
        }])
    }

    pub fn segments(&self) -> &[TraceSegment] {
        &self.segments
    }

    fn segment_index(&self, t: f64) -> usize {
        self.segments
            .partition_point(|s| s.start <= t)
            .saturating_sub(1)
    }

    pub fn bandwidth_at(&self, t: f64) -> f64 {
        self.segments[self.segment_index(t)].bytes_per_sec
    }

    /// Seconds needed to move `bytes` starting at time `start`.
    pub fn download_time(&self, start: f64, bytes: f64) -> f64 {
        let mut idx = self.segment_index(start);
        let mut t = start;
        let mut remaining = bytes;
        loop {
            let seg = &self.segments[idx];
            let Some(next) = self.segments.get(idx + 1) else {
                return t + remaining / seg.bytes_per_sec - start;
            };
            let available = (next.start - t) * seg.bytes_per_sec;
            if remaining <= available {
                return t + remaining / seg.bytes_per_sec - start;
            }
            remaining -= available;
            t = next.start;
            idx += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(start: f64, bytes_per_sec: f64) -> TraceSegment {
        TraceSegment {
            start,
            bytes_per_sec,
        }
    }

    #[test]
    fn invariants_enforced() {
        assert!(matches!(
            ThroughputTrace::new(vec![]),
            Err(Error::EmptyTrace)
        ));
        assert!(ThroughputTrace::new(vec![seg(1.0, 5.0)]).is_err());
        assert!(ThroughputTrace::new(vec![seg(0.0, 0.0)]).is_err());
        assert!(ThroughputTrace::new(vec![seg(0.0, 1.0), seg(0.0, 2.0)]).is_err());
        assert!(ThroughputTrace::new(vec![seg(0.0, 1.0), seg(2.0, -2.0)]).is_err());
    }

    #[test]
    fn constant_download() {
        let t = ThroughputTrace::constant(1e6).unwrap();
        assert_eq!(t.download_time(0.0, 1e6), 1.0);
        assert_eq!(t.download_time(123.0, 2.5e5), 0.25);
    }

    #[test]
    fn spans_segments() {
        // 1 s at 100 B/s, then 1 s at 50 B/s, then 200 B/s forever
        let t =
            ThroughputTrace::new(vec![seg(0.0, 100.0), seg(1.0, 50.0), seg(2.0, 200.0)]).unwrap();
        assert!((t.download_time(0.5, 50.0) - 0.5).abs() < 1e-12);
        assert!((t.download_time(0.5, 100.0) - 1.5).abs() < 1e-12);
        assert!((t.download_time(0.0, 350.0) - 3.0).abs() < 1e-12);
        assert_eq!(t.bandwidth_at(1.0), 50.0);
        assert_eq!(t.bandwidth_at(99.0), 200.0);
    }

    /// Fine-step numeric integration, independent of the segment walk.
    fn integrate(t: &ThroughputTrace, from: f64, to: f64) -> f64 {
        let steps = 200_000;
        let h = (to - from) / steps as f64;
        (0..steps)
            .map(|i| t.bandwidth_at(from + (i as f64 + 0.5) * h) * h)
            .sum()
    }

    proptest! {
        #[test]
        fn download_time_solves_integral(
            rates in prop::collection::vec(1e3f64..1e7, 1..6),
            widths in prop::collection::vec(0.5f64..5.0, 6),
            start in 0.0f64..10.0,
            bytes in 1e3f64..2e7,
        ) {
            let mut segs = Vec::new();
            let mut at = 0.0;
            for (i, r) in rates.iter().enumerate() {
                segs.push(seg(at, *r));
                at += widths[i];
            }
            let trace = ThroughputTrace::new(segs).unwrap();
            let d = trace.download_time(start, bytes);
            // exact breakpoints make midpoint integration exact except in the straddling cells
            let moved = integrate(&trace, start, start + d);
            let max_rate = rates.iter().copied().fold(0.0, f64::max);
            let cell = d / 200_000.0;
            prop_assert!((moved - bytes).abs() <= max_rate * cell * rates.len() as f64 + 1e-6 * bytes);
            // tighter: the analytic integral with segment bookkeeping
            let mut acc = 0.0;
            for (i, s) in trace.segments().iter().enumerate() {
                let end = trace.segments().get(i + 1).map_or(f64::INFINITY, |n| n.start);
                let lo = s.start.max(start);
                let hi = end.min(start + d);
                if hi > lo {
                    acc += (hi - lo) * s.bytes_per_sec;
                }
            }
            prop_assert!((acc - bytes).abs() / max_rate < 1e-9);
        }
    }
}
