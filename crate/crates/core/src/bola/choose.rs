use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bola::params::{BolaParams, NegativePolicy};
use crate::error::Error;
use crate::media::ChunkLadder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    Send(u32),
    NoSend,
}

impl Decision {
    pub fn format_id(self) -> Option<u32> {
        match self {
            Decision::Send(id) => Some(id),
            Decision::NoSend => None,
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Send(id) => write!(f, "Send(format {id})"),
            Decision::NoSend => f.write_str("NoSend"),
        }
    }
}

/// Where the decision runs. A client may pause; a server always sends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMode {
    Client,
    Server,
}

impl FromStr for DecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "client" => Ok(DecisionMode::Client),
            "server" => Ok(DecisionMode::Server),
            other => Err(Error::config(format!("unknown mode `{other}`"))),
        }
    }
}

/// `(V (v + γp) - q) / size`
pub fn objective(params: &BolaParams, utility: f64, size: f64, q: f64) -> f64 {
    (params.zero_crossing(utility) - q) / size
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Candidate {
    pub format_id: u32,
    pub size: f64,
    pub utility: f64,
}

pub(crate) fn candidates<'a>(
    params: &'a BolaParams,
    ladder: &'a ChunkLadder,
) -> impl Iterator<Item = Candidate> + Clone + 'a {
    ladder.encodings().iter().map(move |e| Candidate {
        format_id: e.format_id,
        size: e.size as f64,
        utility: params.utility(e),
    })
}

/// Argmax objective; ties go to the larger size, then the lower format id.
fn argmax_objective(
    params: &BolaParams,
    cands: impl Iterator<Item = Candidate>,
    q: f64,
) -> Option<(Candidate, f64)> {
    let mut best: Option<(Candidate, f64)> = None;
    for c in cands {
        let obj = objective(params, c.utility, c.size, q);
        let better = match best {
            None => true,
            Some((b, b_obj)) => {
                obj > b_obj
                    || (obj == b_obj
                        && (c.size > b.size || (c.size == b.size && c.format_id < b.format_id)))
            }
        };
        if better {
            best = Some((c, obj));
        }
    }
    best
}

/// Argmax utility; ties go to the smaller size.
fn argmax_utility(cands: impl Iterator<Item = Candidate>) -> Option<Candidate> {
    cands.fold(None, |best: Option<Candidate>, c| match best {
        Some(b) if c.utility < b.utility || (c.utility == b.utility && c.size >= b.size) => Some(b),
        _ => Some(c),
    })
}

pub(crate) fn choose_among(
    params: &BolaParams,
    cands: impl Iterator<Item = Candidate> + Clone,
    q: f64,
    mode: DecisionMode,
    policy: NegativePolicy,
) -> Decision {
    let Some((best, obj)) = argmax_objective(params, cands.clone(), q) else {
        return Decision::NoSend;
    };
    if obj >= 0.0 {
        return Decision::Send(best.format_id);
    }
    match (mode, policy) {
        (DecisionMode::Client, _) => Decision::NoSend,
        (DecisionMode::Server, NegativePolicy::ArgmaxObjective) => Decision::Send(best.format_id),
        (DecisionMode::Server, NegativePolicy::ArgmaxUtility) => {
            Decision::Send(argmax_utility(cands).map_or(best.format_id, |c| c.format_id))
        }
    }
}

/// BOLA-BASIC's per-chunk decision at buffer level `q` seconds.
pub fn choose(
    params: &BolaParams,
    ladder: &ChunkLadder,
    q: f64,
    mode: DecisionMode,
    policy: NegativePolicy,
) -> Decision {
    choose_among(params, candidates(params, ladder), q, mode, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bola::params::{calibrate, CalibrationConfig, TopUtility};
    use crate::media::{
        db_to_ssim, validate_ladder, AverageLadder, Encoding, LadderCandidate, LadderPolicy,
        UtilityKind,
    };

    fn ladder(pairs: &[(u64, f64)]) -> ChunkLadder {
        validate_ladder(
            LadderCandidate {
                chunk_index: 0,
                duration: 2.002,
                encodings: pairs
                    .iter()
                    .enumerate()
                    .map(|(i, &(s, q))| Encoding::new(i as u32, s, q).unwrap())
                    .collect(),
            },
            LadderPolicy::Reject,
        )
        .unwrap()
    }

    fn v2_params() -> BolaParams {
        let avg =
            AverageLadder::new(vec![1e6, 4e6], vec![0.90, 0.98], UtilityKind::SsimRaw).unwrap();
        calibrate(&avg, &CalibrationConfig::default()).unwrap()
    }

    const CLIENT: DecisionMode = DecisionMode::Client;
    const SERVER: DecisionMode = DecisionMode::Server;
    const OBJ: NegativePolicy = NegativePolicy::ArgmaxObjective;
    const UTIL: NegativePolicy = NegativePolicy::ArgmaxUtility;

    #[test]
    fn objective_identities() {
        let p = v2_params();
        let zero = p.zero_crossing(0.9);
        assert_eq!(objective(&p, 0.9, 1e6, zero), 0.0);
        // plug-in value
        assert!((objective(&p, 0.90, 1e6, 5.0) - 5.263_157_894_736_947e-7).abs() < 1e-18);
        let a = objective(&p, 0.95, 1e6, 1.0);
        assert!((objective(&p, 0.95, 2e6, 1.0) - a / 2.0).abs() < 1e-20);
    }

    #[test]
    fn single_format_always_sends_below_crossing() {
        let p = v2_params();
        let l = ladder(&[(1_000_000, 0.95)]);
        let zero = p.zero_crossing(0.95);
        assert_eq!(choose(&p, &l, zero * 0.5, CLIENT, OBJ), Decision::Send(0));
        assert_eq!(choose(&p, &l, zero + 1.0, CLIENT, OBJ), Decision::NoSend);
        assert_eq!(choose(&p, &l, zero + 1.0, SERVER, OBJ), Decision::Send(0));
    }

    #[test]
    fn two_format_fixture() {
        let p = v2_params();
        let l = ladder(&[(1_000_000, 0.90), (4_000_000, 0.98)]);
        let f0 = objective(&p, 0.90, 1e6, 0.0);
        let f1 = objective(&p, 0.98, 4e6, 0.0);
        assert!((f0 - 5.526e-6).abs() < 1e-9 && (f1 - 3.276e-6).abs() < 1e-9);
        assert_eq!(choose(&p, &l, 0.0, CLIENT, UTIL), Decision::Send(0));
        assert_eq!(choose(&p, &l, 10.0, CLIENT, UTIL), Decision::Send(1));
        assert_eq!(choose(&p, &l, 14.0, CLIENT, UTIL), Decision::NoSend);
        assert_eq!(choose(&p, &l, 14.0, SERVER, UTIL), Decision::Send(1));
        // argmax of the negative objectives: -8.47e-6 vs -2.24e-7
        assert_eq!(choose(&p, &l, 14.0, SERVER, OBJ), Decision::Send(1));
    }

    #[test]
    fn ties_prefer_larger_then_smaller_on_utility() {
        let p = v2_params();
        // crossover of the fixture sits exactly at 3 s
        let l = ladder(&[(1_000_000, 0.90), (4_000_000, 0.98)]);
        let f0 = objective(&p, 0.90, 1e6, 3.0);
        let f1 = objective(&p, 0.98, 4e6, 3.0);
        if f0 == f1 {
            assert_eq!(choose(&p, &l, 3.0, CLIENT, OBJ), Decision::Send(1));
        }
        // equal utilities under the utility fallback go to the smaller encoding
        let flat = ladder(&[(1_000_000, 0.5), (2_000_000, 0.5)]);
        assert_eq!(choose(&p, &flat, 30.0, SERVER, UTIL), Decision::Send(0));
    }

    #[test]
    fn small_gain_beats_double_size_near_minus_gamma_p() {
        // v1-style dB params, γp ≈ -5.34
        let top_db = 10.0 * (1.0f64 / 0.02).log10();
        let avg =
            AverageLadder::new(vec![1e6, 4e6], vec![10.0, top_db], UtilityKind::SsimDb).unwrap();
        let cfg = CalibrationConfig {
            utility_kind: UtilityKind::SsimDb,
            top_utility: TopUtility::MaxAverage,
            ..CalibrationConfig::default()
        };
        let p = calibrate(&avg, &cfg).unwrap();
        let s = 500_000;
        let l = ladder(&[
            (s, db_to_ssim(5.5).unwrap().value()),
            (2 * s, db_to_ssim(5.9).unwrap().value()),
        ]);
        assert_eq!(choose(&p, &l, 0.0, CLIENT, OBJ), Decision::Send(1));
        // well away from -γp the same 0.4 dB no longer pays for double the bytes
        let l = ladder(&[
            (s, db_to_ssim(12.0).unwrap().value()),
            (2 * s, db_to_ssim(12.4).unwrap().value()),
        ]);
        assert_eq!(choose(&p, &l, 0.0, CLIENT, OBJ), Decision::Send(0));
    }

    #[test]
    fn display() {
        assert_eq!(Decision::Send(3).to_string(), "Send(format 3)");
        assert_eq!(Decision::NoSend.to_string(), "NoSend");
    }
}
