//! Encoding ladders: the per-chunk menu BOLA picks from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::quality::{Ssim, UtilityKind};

/// 120 frames at 59.94 fps.
pub const DEFAULT_CHUNK_DURATION: f64 = 2.002;

/// One encoded version of a chunk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    pub format_id: u32,
    /// Bytes.
    pub size: u64,
    pub ssim: Ssim,
}

impl Encoding {
    pub fn new(format_id: u32, size: u64, ssim: f64) -> Result<Self> {
        Ok(Encoding {
            format_id,
            size,
            ssim: Ssim::new(ssim)?,
        })
    }
}

/// What to do with encodings that break size/quality monotonicity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LadderPolicy {
    #[default]
    Reject,
    DropDominated,
}

/// Unvalidated input to [`validate_ladder`].
#[derive(Clone, Debug, PartialEq)]
pub struct LadderCandidate {
    pub chunk_index: u32,
    pub duration: f64,
    pub encodings: Vec<Encoding>,
}

/// The encodings available for one chunk, strictly ascending by size with
/// nondecreasing SSIM.
#[derive(Clone, Debug, PartialEq)]
pub struct ChunkLadder {
    chunk_index: u32,
    duration: f64,
    encodings: Vec<Encoding>,
}

impl ChunkLadder {
    pub fn chunk_index(&self) -> u32 {
        self.chunk_index
    }

    /// Seconds of video in this chunk.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn encodings(&self) -> &[Encoding] {
        &self.encodings
    }

    pub fn len(&self) -> usize {
        self.encodings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.encodings.is_empty()
    }

    pub fn get(&self, format_id: u32) -> Option<&Encoding> {
        self.encodings.iter().find(|e| e.format_id == format_id)
    }

    pub fn largest(&self) -> &Encoding {
        self.encodings
            .last()
            .expect("validated ladders are nonempty")
    }

    pub fn into_candidate(self) -> LadderCandidate {
        LadderCandidate {
            chunk_index: self.chunk_index,
            duration: self.duration,
            encodings: self.encodings,
        }
    }
}

/// Checks (and under [`LadderPolicy::DropDominated`] repairs) a candidate ladder.
///
/// Encodings are sorted by size first. Duplicate sizes are always an error.
/// Dropping removes every encoding for which some strictly smaller encoding
/// has at least the same SSIM.
pub fn validate_ladder(raw: LadderCandidate, policy: LadderPolicy) -> Result<ChunkLadder> {
    let LadderCandidate {
        chunk_index: chunk,
        duration,
        mut encodings,
    } = raw;
    if encodings.is_empty() {
        return Err(Error::EmptyLadder { chunk });
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidDuration { chunk, duration });
    }
    if let Some(e) = encodings.iter().find(|e| e.size == 0) {
        return Err(Error::ZeroSize {
            chunk,
            format: e.format_id,
        });
    }
    encodings.sort_by_key(|e| e.size);
    if let Some(w) = encodings.windows(2).find(|w| w[0].size == w[1].size) {
        return Err(Error::DuplicateSize {
            chunk,
            size: w[0].size,
        });
    }

    match policy {
        LadderPolicy::Reject => {
            if let Some(w) = encodings.windows(2).find(|w| w[1].ssim < w[0].ssim) {
                return Err(Error::NotMonotone {
                    chunk,
                    format: w[1].format_id,
                });
            }
        }
        LadderPolicy::DropDominated => {
            let mut best = f64::NEG_INFINITY;
            encodings.retain(|e| {
                let keep = e.ssim.value() > best;
                best = best.max(e.ssim.value());
                keep
            });
        }
    }

    Ok(ChunkLadder {
        chunk_index: chunk,
        duration,
        encodings,
    })
}

/// Long-run mean size and utility for each format position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageLadder {
    sizes: Vec<f64>,
    utilities: Vec<f64>,
    utility_kind: UtilityKind,
}

impl AverageLadder {
    pub fn new(sizes: Vec<f64>, utilities: Vec<f64>, utility_kind: UtilityKind) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != utilities.len() {
            return Err(Error::config(format!(
                "average ladder needs matching nonempty sizes/utilities, got {} and {}",
                sizes.len(),
                utilities.len()
            )));
        }
        if sizes.iter().chain(&utilities).any(|x| !x.is_finite()) || sizes[0] <= 0.0 {
            return Err(Error::AverageNotMonotone { position: 0 });
        }
        for i in 1..sizes.len() {
            if sizes[i] <= sizes[i - 1] || utilities[i] < utilities[i - 1] {
                return Err(Error::AverageNotMonotone { position: i });
            }
        }
        Ok(AverageLadder {
            sizes,
            utilities,
            utility_kind,
        })
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn utility_kind(&self) -> UtilityKind {
        self.utility_kind
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn max_utility(&self) -> f64 {
        self.utilities
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Averages sizes and utilities per format position. Utilities are computed
/// in `kind`'s domain before averaging.
pub fn average_ladder(
    chunks: &[ChunkLadder],
    kind: UtilityKind,
    db_cap: f64,
) -> Result<AverageLadder> {
    let first = chunks
        .first()
        .ok_or_else(|| Error::config("cannot average an empty ladder sequence"))?;
    let m = first.len();
    let mut sizes = vec![0.0; m];
    let mut utils = vec![0.0; m];
    // running means: exact when every chunk carries the same values
    for (k, ladder) in chunks.iter().enumerate() {
        let weight = 1.0 / (k + 1) as f64;
        if ladder.len() != m {
            return Err(Error::InconsistentFormatCount {
                chunk: ladder.chunk_index,
                expected: m,
                found: ladder.len(),
            });
        }
        for (i, e) in ladder.encodings.iter().enumerate() {
            sizes[i] += (e.size as f64 - sizes[i]) * weight;
            utils[i] += (kind.utility(e.ssim, db_cap)? - utils[i]) * weight;
        }
    }
    AverageLadder::new(sizes, utils, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::quality::{ssim_to_db, DEFAULT_DB_CAP};
    use proptest::prelude::*;

    fn candidate(chunk: u32, sizes: &[u64], ssims: &[f64]) -> LadderCandidate {
        LadderCandidate {
            chunk_index: chunk,
            duration: DEFAULT_CHUNK_DURATION,
            encodings: sizes
                .iter()
                .zip(ssims)
                .enumerate()
                .map(|(i, (&s, &q))| Encoding::new(i as u32, s, q).unwrap())
                .collect(),
        }
    }

    #[test]
    fn valid_ladder_unchanged() {
        let c = candidate(0, &[1_000_000, 2_000_000], &[0.9, 0.95]);
        let l = validate_ladder(c.clone(), LadderPolicy::Reject).unwrap();
        assert_eq!(l.encodings(), &c.encodings[..]);
    }

    #[test]
    fn reject_violation() {
        let c = candidate(0, &[1_000_000, 2_000_000], &[0.95, 0.9]);
        assert!(matches!(
            validate_ladder(c, LadderPolicy::Reject),
            Err(Error::NotMonotone {
                chunk: 0,
                format: 1
            })
        ));
    }

    #[test]
    fn drop_dominated_example() {
        let c = candidate(3, &[1_000_000, 2_000_000, 3_000_000], &[0.9, 0.89, 0.95]);
        let l = validate_ladder(c, LadderPolicy::DropDominated).unwrap();
        let sizes: Vec<u64> = l.encodings().iter().map(|e| e.size).collect();
        assert_eq!(sizes, vec![1_000_000, 3_000_000]);
    }

    #[test]
    fn structural_errors() {
        let empty = candidate(1, &[], &[]);
        assert!(matches!(
            validate_ladder(empty, LadderPolicy::DropDominated),
            Err(Error::EmptyLadder { chunk: 1 })
        ));
        let dup = candidate(2, &[5, 5], &[0.5, 0.6]);
        assert!(matches!(
            validate_ladder(dup, LadderPolicy::Reject),
            Err(Error::DuplicateSize { chunk: 2, size: 5 })
        ));
        let zero = candidate(2, &[0, 5], &[0.5, 0.6]);
        assert!(validate_ladder(zero, LadderPolicy::Reject).is_err());
        let mut bad_dur = candidate(2, &[1, 5], &[0.5, 0.6]);
        bad_dur.duration = 0.0;
        assert!(validate_ladder(bad_dur, LadderPolicy::Reject).is_err());
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let c = candidate(0, &[3, 1, 2], &[0.9, 0.5, 0.7]);
        let l = validate_ladder(c, LadderPolicy::Reject).unwrap();
        let ids: Vec<u32> = l.encodings().iter().map(|e| e.format_id).collect();
        assert_eq!(ids, vec![1, 2, 0]);
    }

    #[test]
    fn average_single_chunk_is_identity() {
        let l =
            validate_ladder(candidate(0, &[10, 20], &[0.9, 0.99]), LadderPolicy::Reject).unwrap();
        let avg = average_ladder(&[l], UtilityKind::SsimRaw, DEFAULT_DB_CAP).unwrap();
        assert_eq!(avg.sizes(), &[10.0, 20.0]);
        assert_eq!(avg.utilities(), &[0.9, 0.99]);
    }

    #[test]
    fn average_sizes() {
        let a = validate_ladder(
            candidate(0, &[1_000_000, 5_000_000], &[0.9, 0.95]),
            LadderPolicy::Reject,
        )
        .unwrap();
        let b = validate_ladder(
            candidate(1, &[3_000_000, 6_000_000], &[0.9, 0.95]),
            LadderPolicy::Reject,
        )
        .unwrap();
        let avg = average_ladder(&[a, b], UtilityKind::SsimRaw, DEFAULT_DB_CAP).unwrap();
        assert_eq!(avg.sizes()[0], 2_000_000.0);
    }

    #[test]
    fn db_domain_average_differs_from_db_of_raw_average() {
        let a = validate_ladder(candidate(0, &[1, 2], &[0.9, 0.95]), LadderPolicy::Reject).unwrap();
        let b =
            validate_ladder(candidate(1, &[1, 2], &[0.99, 0.995]), LadderPolicy::Reject).unwrap();
        let in_db =
            average_ladder(&[a.clone(), b.clone()], UtilityKind::SsimDb, DEFAULT_DB_CAP).unwrap();
        let raw = average_ladder(&[a, b], UtilityKind::SsimRaw, DEFAULT_DB_CAP).unwrap();
        // format 0: mean(10 dB, 20 dB) = 15 dB, but dB(mean(0.9, 0.99)) = dB(0.945) ≈ 12.596 dB
        assert!((in_db.utilities()[0] - 15.0).abs() < 1e-12);
        let db_of_mean = ssim_to_db(Ssim::new(raw.utilities()[0]).unwrap(), DEFAULT_DB_CAP)
            .unwrap()
            .value();
        assert!((db_of_mean - 12.596_373_105_057_56).abs() < 1e-9);
        assert!(in_db.utilities()[0] - db_of_mean > 2.0);
    }

    #[test]
    fn average_errors() {
        let a = validate_ladder(candidate(0, &[1, 2], &[0.9, 0.95]), LadderPolicy::Reject).unwrap();
        let b = validate_ladder(candidate(1, &[1], &[0.9]), LadderPolicy::Reject).unwrap();
        assert!(matches!(
            average_ladder(&[a, b], UtilityKind::SsimRaw, DEFAULT_DB_CAP),
            Err(Error::InconsistentFormatCount {
                chunk: 1,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            AverageLadder::new(vec![10.0, 5.0], vec![0.5, 0.6], UtilityKind::SsimRaw),
            Err(Error::AverageNotMonotone { position: 1 })
        ));
        assert!(matches!(
            AverageLadder::new(vec![5.0, 10.0], vec![0.6, 0.5], UtilityKind::SsimRaw),
            Err(Error::AverageNotMonotone { position: 1 })
        ));
        assert!(AverageLadder::new(vec![5.0], vec![], UtilityKind::SsimRaw).is_err());
        assert!(average_ladder(&[], UtilityKind::SsimRaw, DEFAULT_DB_CAP).is_err());
    }

    fn arb_candidate() -> impl Strategy<Value = LadderCandidate> {
        prop::collection::vec((1u64..10_000_000, 0.01f64..1.0), 1..12).prop_map(|pairs| {
            let mut seen = std::collections::HashSet::new();
            let encodings = pairs
                .into_iter()
                .filter(|(s, _)| seen.insert(*s))
                .enumerate()
                .map(|(i, (s, q))| Encoding::new(i as u32, s, q).unwrap())
                .collect();
            LadderCandidate {
                chunk_index: 0,
                duration: 2.0,
                encodings,
            }
        })
    }

    proptest! {
        #[test]
        fn dropped_output_has_no_dominated_pair(c in arb_candidate()) {
            let l = validate_ladder(c, LadderPolicy::DropDominated).unwrap();
            for (i, big) in l.encodings().iter().enumerate() {
                for small in &l.encodings()[..i] {
                    prop_assert!(small.size < big.size);
                    prop_assert!(small.ssim < big.ssim);
                }
            }
            // and it always passes the strict check
            prop_assert!(validate_ladder(l.into_candidate(), LadderPolicy::Reject).is_ok());
        }

        #[test]
        fn average_of_identical_ladders_is_exact(c in arb_candidate(), n in 1usize..8) {
            let l = validate_ladder(c, LadderPolicy::DropDominated).unwrap();
            let copies = vec![l.clone(); n];
            for kind in [UtilityKind::SsimRaw, UtilityKind::SsimDb] {
                let avg = average_ladder(&copies, kind, DEFAULT_DB_CAP).unwrap();
                let single = average_ladder(std::slice::from_ref(&l), kind, DEFAULT_DB_CAP).unwrap();
                prop_assert_eq!(&avg, &single);
            }
        }
    }
}
