//! Physical and logical Bell measurements under photon loss.
//!
//! A logical Bell measurement on QPC(n,m) is `n*m` simultaneous physical
//! Bell measurements, one per photon pair. Only the photons of the incoming
//! (signal) logical qubit are lossy; the ancilla half is assumed complete
//! here and its imperfections are folded into the effective transmission.
//!
//! Decoding rules:
//! * block `i` yields its first index `s_i` if any of its pairs was not erased;
//! * logical `k` is the parity of all `s_i` and needs every block;
//! * logical `l` is the parity of the second indices of a block in which every
//!   pair was fully identified.


use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{index_set, BellIndex, CodeParams};
use crate::error::{check_probability, Error, Result};

/// Largest `n*m` accepted by the exhaustive enumerations.
pub const MAX_ENUMERATION_PHOTONS: u32 = 16;

/// Result of one physical Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhysicalOutcome {
    /// Both indices known.
    FullyIdentified { k: u8, l: u8 },
    /// Only the first index known.
    KOnlyIdentified { k: u8 },
    /// Nothing learned; at least one photon of the pair was missing.
    Erasure,
}

impl PhysicalOutcome {
    pub fn k(&self) -> Option<u8> {
        match *self {
            PhysicalOutcome::FullyIdentified { k, .. } | PhysicalOutcome::KOnlyIdentified { k } => Some(k),
            PhysicalOutcome::Erasure => None,
        }
    }
}

/// The physical-level measurement device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Apparatus {
    /// Beam splitter, polarizing beam splitters and number-resolving
    /// detectors. Identifies `phi_1l` completely, `phi_0l` only up to `l`.
    #[default]
    LinearOptics,
    /// Hypothetical ideal Bell measurement that identifies all four states
    /// whenever both photons arrive.
    Perfect,
}

impl Apparatus {
    pub fn outcome(self, true_state: BellIndex, photon_a_present: bool, photon_b_present: bool) -> PhysicalOutcome {
        if !(photon_a_present && photon_b_present) {
            return PhysicalOutcome::Erasure;
        }
        match (self, true_state.k()) {
            (Apparatus::LinearOptics, 0) => PhysicalOutcome::KOnlyIdentified { k: 0 },
            (_, k) => PhysicalOutcome::FullyIdentified { k, l: true_state.l() },
        }
    }
}

/// Physical Bell measurement with the static linear-optics apparatus.
pub fn physical_bm(true_state: BellIndex, photon_a_present: bool, photon_b_present: bool) -> PhysicalOutcome {
    Apparatus::LinearOptics.outcome(true_state, photon_a_present, photon_b_present)
}

/// Which signal photons were lost, stored row-major (block, position).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LossPattern {
    code: CodeParams,
    lost: Vec<bool>,
}

impl LossPattern {
    pub fn new(code: CodeParams, lost: Vec<bool>) -> Result<Self> {
        let expected = code.photons() as usize;
        if lost.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: lost.len(),
            });
        }
        Ok(Self { code, lost })
    }

    /// Bit `block*m + pos` of `mask` set means that photon is lost.
    pub fn from_mask(code: CodeParams, mask: u64) -> Self {
        let lost = (0..code.photons()).map(|i| mask >> i & 1 == 1).collect();
        Self { code, lost }
    }

    pub fn is_lost(&self, block: usize, pos: usize) -> bool {
        self.lost[block * self.code.m() as usize + pos]
    }

    pub fn lost_count(&self) -> u32 {
        self.lost.iter().filter(|&&x| x).count() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    /// Some block lost all of its photons.
    KUnrecoverable,
    /// No block was fully identified.
    LUnrecoverable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalBmResult {
    Success(BellIndex),
    HeraldedFailure(FailureReason),
}

/// Decode a row-major `n x m` grid of physical outcomes into a logical result.
///
/// A `KUnrecoverable` failure is reported in preference to `LUnrecoverable`.
pub fn decode_logical(outcomes: &[PhysicalOutcome], code: CodeParams) -> Result<LogicalBmResult> {
    let expected = code.photons() as usize;
    if outcomes.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: outcomes.len(),
        });
    }
    Ok(decode_rows(outcomes, code.m() as usize))
}

fn decode_rows(outcomes: &[PhysicalOutcome], m: usize) -> LogicalBmResult {
    let mut k = 0u8;
    let mut l = None;
    for row in outcomes.chunks_exact(m) {
        let Some(s) = row.iter().find_map(PhysicalOutcome::k) else {
            return LogicalBmResult::HeraldedFailure(FailureReason::KUnrecoverable);
        };
        k ^= s;
        if l.is_none() {
            l = row.iter().try_fold(0u8, |acc, o| match o {
                PhysicalOutcome::FullyIdentified { l, .. } => Some(acc ^ l),
                _ => None,
            });
        }
    }
    match l {
        Some(l) => LogicalBmResult::Success(BellIndex::new(k, l)),
        None => LogicalBmResult::HeraldedFailure(FailureReason::LUnrecoverable),
    }
}

/// Monte Carlo tally for [`sample_bm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    /// Trials decoded to the true Bell index.
    pub successes: u64,
    /// Trials decoded to a wrong Bell index. Always zero for a sound decoder.
    pub misidentified: u64,
    pub trials: u64,
    pub estimate: f64,
    pub standard_error: f64,
}

/// Estimate the logical success probability by simulation.
///
/// Each trial draws a uniformly random decomposition term of the true
/// logical Bell state and loses each signal photon independently with
/// probability `1 - eta`. Trial `t` uses its own ChaCha stream keyed by
/// `(seed, t)`, so the result does not depend on how trials are scheduled.
pub fn sample_bm(code: CodeParams, true_state: BellIndex, eta: f64, trials: u64, seed: u64) -> Result<SampleSummary> {
    sample_bm_with(Apparatus::LinearOptics, code, true_state, eta, trials, seed)
}

/// As [`sample_bm`], with the true Bell state drawn uniformly at random in
/// every trial. Its expectation is the closed-form success probability.
pub fn sample_bm_average(code: CodeParams, eta: f64, trials: u64, seed: u64) -> Result<SampleSummary> {
    sample_bm_with(Apparatus::LinearOptics, code, InputState::Uniform, eta, trials, seed)
}

/// Which logical Bell state enters the measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputState {
    Fixed(BellIndex),
    /// Fresh uniformly random Bell state per trial.
    Uniform,
}

impl From<BellIndex> for InputState {
    fn from(idx: BellIndex) -> Self {
        InputState::Fixed(idx)
    }
}

pub fn sample_bm_with(
    apparatus: Apparatus,
    code: CodeParams,
    input: impl Into<InputState>,
    eta: f64,
    trials: u64,
    seed: u64,
) -> Result<SampleSummary> {
    check_probability("eta", eta)?;
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let widest = code.n().max(code.m());
    if widest > 64 {
        return Err(Error::CapacityExceeded {
            what: "block count or block size for sampling",
            value: widest as u64,
            limit: 64,
        });
    }
    let input = input.into();
    let photons = code.photons() as usize;
    let (successes, misidentified) = (0..trials)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(photons),
            |grid, t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let true_state = match input {
                    InputState::Fixed(idx) => idx,
                    InputState::Uniform => BellIndex::ALL[rng.random_range(0..4)],
                };
                (true_state, sample_trial(&mut rng, grid, apparatus, code, true_state, eta))
            },
        )
        .map(|(true_state, res)| match res {
            LogicalBmResult::Success(idx) if idx == true_state => (1u64, 0u64),
            LogicalBmResult::Success(_) => (0, 1),
            LogicalBmResult::HeraldedFailure(_) => (0, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let estimate = successes as f64 / trials as f64;
    let standard_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(SampleSummary {
        successes,
        misidentified,
        trials,
        estimate,
        standard_error,
    })
}

/// Uniformly random bit vector of the given length and parity.
fn random_parity_bits<R: Rng>(rng: &mut R, len: u32, parity: u8) -> u64 {
    let free: u64 = if len > 1 { rng.random::<u64>() & ((1u64 << (len - 1)) - 1) } else { 0 };
    let last = (free.count_ones() as u8 ^ parity) & 1;
    free | (u64::from(last) << (len - 1))
}

fn sample_trial<R: Rng>(
    rng: &mut R,
    grid: &mut Vec<PhysicalOutcome>,
    apparatus: Apparatus,
    code: CodeParams,
    true_state: BellIndex,
    eta: f64,
) -> LogicalBmResult {
    grid.clear();
    let s = random_parity_bits(rng, code.n(), true_state.k());
    for block in 0..code.n() {
        let s_i = (s >> block & 1) as u8;
        let r = random_parity_bits(rng, code.m(), true_state.l());
        for pos in 0..code.m() {
            let pair = BellIndex::new(s_i, (r >> pos & 1) as u8);
            let signal_present = rng.random::<f64>() < eta;
            grid.push(apparatus.outcome(pair, signal_present, true));
        }
    }
    decode_rows(grid, code.m() as usize)
}

/// Exhaustive tally of every (loss pattern, decomposition term) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessProfile {
    pub code: CodeParams,
    pub true_state: BellIndex,
    pub apparatus: Apparatus,
    /// `successes_by_loss[mu]`: number of pairs with exactly `mu` lost photons
    /// that decode to the true index.
    pub successes_by_loss: Vec<u64>,
    /// Pairs that decode to a wrong index.
    pub misidentified: u64,
    /// Number of decomposition terms (every loss pattern is combined with each).
    pub terms: u64,
}

impl SuccessProfile {
    /// Exact success probability when each signal photon survives with
    /// probability `eta`.
    pub fn probability(&self, eta: &BigRational) -> Result<BigRational> {
        check_rational_probability(eta)?;
        let photons = self.code.photons() as usize;
        let loss = BigRational::one() - eta;
        let mut total = BigRational::zero();
        for (mu, &count) in self.successes_by_loss.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let weight = num_traits::pow(eta.clone(), photons - mu) * num_traits::pow(loss.clone(), mu);
            total += weight * BigRational::from_integer(BigInt::from(count));
        }
        Ok(total / BigRational::from_integer(BigInt::from(self.terms)))
    }
}

pub(crate) fn check_rational_probability(eta: &BigRational) -> Result<()> {
    if eta < &BigRational::zero() || eta > &BigRational::one() {
        return Err(Error::ProbabilityOutOfRange {
            name: "eta",
            value: eta.to_string(),
        });
    }
    Ok(())
}

fn check_enumeration_capacity(code: CodeParams) -> Result<()> {
    if code.photons() > MAX_ENUMERATION_PHOTONS {
        return Err(Error::CapacityExceeded {
            what: "photons per logical qubit for exhaustive enumeration",
            value: code.photons() as u64,
            limit: MAX_ENUMERATION_PHOTONS as u64,
        });
    }
    Ok(())
}

/// Decode every combination of loss pattern and decomposition term.
///
/// Cost is `2^(2nm-1)` decodes; intended for oracle-scale codes.
pub fn enumerate_profile(code: CodeParams, true_state: BellIndex, apparatus: Apparatus) -> Result<SuccessProfile> {
    check_enumeration_capacity(code)?;
    let n = code.n() as usize;
    let m = code.m() as usize;
    let block_terms = index_set(true_state.k(), code.n())?;
    let pair_terms = index_set(true_state.l(), code.m())?;
    let terms = (block_terms.len() as u64) * (pair_terms.len() as u64).pow(n as u32);

    let mut successes_by_loss = vec![0u64; n * m + 1];
    let mut misidentified = 0u64;
    let mut grid = vec![PhysicalOutcome::Erasure; n * m];
    let mut choice = vec![0usize; n];

    for mask in 0..1u64 << (n * m) {
        let loss = LossPattern::from_mask(code, mask);
        let mu = loss.lost_count() as usize;
        for s in &block_terms {
            choice.iter_mut().for_each(|c| *c = 0);
            loop {
                for (block, &c) in choice.iter().enumerate() {
                    let r = &pair_terms[c];
                    for pos in 0..m {
                        let pair = BellIndex::new(s.bit(block), r.bit(pos));
                        grid[block * m + pos] = apparatus.outcome(pair, !loss.is_lost(block, pos), true);
                    }
                }
                match decode_rows(&grid, m) {
                    LogicalBmResult::Success(idx) if idx == true_state => successes_by_loss[mu] += 1,
                    LogicalBmResult::Success(_) => misidentified += 1,
                    LogicalBmResult::HeraldedFailure(_) => {}
                }
                if !advance(&mut choice, pair_terms.len()) {
                    break;
                }
            }
        }
    }

    Ok(SuccessProfile {
        code,
        true_state,
        apparatus,
        successes_by_loss,
        misidentified,
        terms,
    })
}

/// Mixed-radix increment; false once every digit has wrapped.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Exact logical success probability by brute-force enumeration.
pub fn enumerate_exact(code: CodeParams, true_state: BellIndex, eta: &BigRational) -> Result<BigRational> {
    check_rational_probability(eta)?;
    enumerate_profile(code, true_state, Apparatus::LinearOptics)?.probability(eta)
}

/// Exact success probability averaged over the four Bell states.
///
/// Per-state probabilities differ: `phi_1l` carry `s_i = 1` in an odd number
/// of blocks and `phi_0l` in an even number, possibly none. The average is
/// the closed-form value.
pub fn enumerate_exact_average(code: CodeParams, eta: &BigRational) -> Result<BigRational> {
    check_rational_probability(eta)?;
    let mut total = BigRational::zero();
    for idx in BellIndex::ALL {
        total += enumerate_exact(code, idx, eta)?;
    }
    Ok(total / BigRational::from_integer(BigInt::from(4)))
}

/// Counts from [`audit_soundness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SoundnessReport {
    /// Distinct outcome grids decoded.
    pub grids: u64,
    pub successes: u64,
    pub misidentified: u64,
}

/// Decode every distinct outcome grid the apparatus can produce for
/// `true_state`, counting successes that carry a wrong index.
///
/// Grids are built block by block from the distinct rows a single block can
/// show. A row is fixed by the block index `s_i`, the set of surviving
/// photons and the second indices of the surviving pairs; a lost pair shows
/// an erasure whatever its second index, so the missing bits only complete
/// the parity. A fully erased row hides its `s_i`, so the parity constraint
/// on the block indices only binds grids without one.
pub fn audit_soundness(code: CodeParams, true_state: BellIndex, apparatus: Apparatus) -> Result<SoundnessReport> {
    check_enumeration_capacity(code)?;
    let m = code.m() as usize;
    let mut report = SoundnessReport::default();

    if code.n() == 1 {
        // A single block is its own grid; decode rows as they are produced.
        for_each_block_row(m, true_state, apparatus, |row, s_i| {
            if s_i == true_state.k() {
                tally(decode_rows(row, m), true_state, &mut report);
            }
        });
        tally(decode_rows(&vec![PhysicalOutcome::Erasure; m], m), true_state, &mut report);
        return Ok(report);
    }

    let mut rows: Vec<(Vec<PhysicalOutcome>, u8)> = Vec::new();
    for_each_block_row(m, true_state, apparatus, |row, s_i| rows.push((row.to_vec(), s_i)));
    let mut grid = vec![PhysicalOutcome::Erasure; code.photons() as usize];
    audit_block(0, 0, false, code, true_state, &rows, &mut grid, &mut report);
    Ok(report)
}

fn tally(result: LogicalBmResult, true_state: BellIndex, report: &mut SoundnessReport) {
    report.grids += 1;
    match result {
        LogicalBmResult::Success(idx) if idx == true_state => report.successes += 1,
        LogicalBmResult::Success(_) => report.misidentified += 1,
        LogicalBmResult::HeraldedFailure(_) => {}
    }
}

/// Calls `visit` once per distinct row that is not fully erased.
fn for_each_block_row(m: usize, true_state: BellIndex, apparatus: Apparatus, mut visit: impl FnMut(&[PhysicalOutcome], u8)) {
    let mut row = vec![PhysicalOutcome::Erasure; m];
    let mut batch: Vec<PhysicalOutcome> = Vec::new();
    for s_i in 0..2u8 {
        for present in 1..1u32 << m {
            let positions: Vec<usize> = (0..m).filter(|&j| present >> j & 1 == 1).collect();
            let all_present = positions.len() == m;
            batch.clear();
            for bits in 0..1u32 << positions.len() {
                if all_present && (bits.count_ones() & 1) as u8 != true_state.l() {
                    continue;
                }
                row.fill(PhysicalOutcome::Erasure);
                for (t, &j) in positions.iter().enumerate() {
                    let pair = BellIndex::new(s_i, (bits >> t & 1) as u8);
                    row[j] = apparatus.outcome(pair, true, true);
                }
                batch.extend_from_slice(&row);
            }
            let mut distinct: Vec<&[PhysicalOutcome]> = batch.chunks_exact(m).collect();
            distinct.sort_unstable();
            distinct.dedup();
            for r in distinct {
                visit(r, s_i);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn audit_block(
    block: usize,
    parity: u8,
    has_erased_block: bool,
    code: CodeParams,
    true_state: BellIndex,
    rows: &[(Vec<PhysicalOutcome>, u8)],
    grid: &mut [PhysicalOutcome],
    report: &mut SoundnessReport,
) {
    let m = code.m() as usize;
    if block == code.n() as usize {
        if !has_erased_block && parity != true_state.k() {
            return;
        }
        tally(decode_rows(grid, m), true_state, report);
        return;
    }
    let span = block * m..(block + 1) * m;
    grid[span.clone()].fill(PhysicalOutcome::Erasure);
    audit_block(block + 1, parity, true, code, true_state, rows, grid, report);
    for (row, s_i) in rows {
        grid[span.clone()].copy_from_slice(row);
        audit_block(block + 1, parity ^ s_i, has_erased_block, code, true_state, rows, grid, report);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use PhysicalOutcome::*;

    fn code(n: u32, m: u32) -> CodeParams {
        CodeParams::new(n, m).unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn physical_outcomes() {
        assert_eq!(physical_bm(BellIndex::new(1, 1), true, true), FullyIdentified { k: 1, l: 1 });
        assert_eq!(physical_bm(BellIndex::new(1, 0), true, true), FullyIdentified { k: 1, l: 0 });
        assert_eq!(physical_bm(BellIndex::new(0, 0), true, true), KOnlyIdentified { k: 0 });
        assert_eq!(physical_bm(BellIndex::new(0, 1), true, true), KOnlyIdentified { k: 0 });
        assert_eq!(physical_bm(BellIndex::new(1, 0), true, false), Erasure);
        assert_eq!(physical_bm(BellIndex::new(1, 0), false, true), Erasure);
        assert_eq!(physical_bm(BellIndex::new(0, 1), false, false), Erasure);
        assert_eq!(
            Apparatus::Perfect.outcome(BellIndex::new(0, 1), true, true),
            FullyIdentified { k: 0, l: 1 }
        );
    }

    #[test]
    fn decode_lossless_all_k1() {
        // s = (1, 1), block r vectors 01 and 10, so k = 0 and l = 1.
        let grid = [
            FullyIdentified { k: 1, l: 0 },
            FullyIdentified { k: 1, l: 1 },
            FullyIdentified { k: 1, l: 1 },
            FullyIdentified { k: 1, l: 0 },
        ];
        assert_eq!(
            decode_logical(&grid, code(2, 2)).unwrap(),
            LogicalBmResult::Success(BellIndex::new(0, 1))
        );
    }

    #[test]
    fn decode_erased_block_is_k_failure() {
        let grid = [Erasure, Erasure, FullyIdentified { k: 1, l: 0 }, FullyIdentified { k: 1, l: 0 }];
        assert_eq!(
            decode_logical(&grid, code(2, 2)).unwrap(),
            LogicalBmResult::HeraldedFailure(FailureReason::KUnrecoverable)
        );
    }

    #[test]
    fn decode_no_intact_block_is_l_failure() {
        let grid = [Erasure, FullyIdentified { k: 1, l: 1 }, FullyIdentified { k: 1, l: 0 }, Erasure];
        assert_eq!(
            decode_logical(&grid, code(2, 2)).unwrap(),
            LogicalBmResult::HeraldedFailure(FailureReason::LUnrecoverable)
        );
    }

    #[test]
    fn decode_k_only_blocks_cannot_give_l() {
        let grid = [KOnlyIdentified { k: 0 }; 4];
        assert_eq!(
            decode_logical(&grid, code(2, 2)).unwrap(),
            LogicalBmResult::HeraldedFailure(FailureReason::LUnrecoverable)
        );
    }

    #[test]
    fn decode_rejects_wrong_dimensions() {
        let grid = [Erasure; 3];
        assert_eq!(
            decode_logical(&grid, code(2, 2)),
            Err(Error::DimensionMismatch { expected: 4, actual: 3 })
        );
    }

    #[test]
    fn loss_pattern_dimensions() {
        assert!(LossPattern::new(code(2, 3), vec![false; 5]).is_err());
        let p = LossPattern::from_mask(code(2, 3), 0b100_001);
        assert!(p.is_lost(0, 0));
        assert!(p.is_lost(1, 2));
        assert!(!p.is_lost(1, 0));
        assert_eq!(p.lost_count(), 2);
    }

    #[test]
    fn enumerate_lossless_small_codes() {
        assert_eq!(enumerate_exact_average(code(1, 1), &rat(1, 1)).unwrap(), rat(1, 2));
        assert_eq!(enumerate_exact_average(code(2, 2), &rat(1, 1)).unwrap(), rat(3, 4));
        for l in 0..2 {
            assert_eq!(enumerate_exact(code(1, 1), BellIndex::new(1, l), &rat(1, 1)).unwrap(), rat(1, 1));
            assert_eq!(enumerate_exact(code(1, 1), BellIndex::new(0, l), &rat(1, 1)).unwrap(), rat(0, 1));
            assert_eq!(enumerate_exact(code(2, 2), BellIndex::new(1, l), &rat(1, 1)).unwrap(), rat(1, 1));
            assert_eq!(enumerate_exact(code(2, 2), BellIndex::new(0, l), &rat(1, 1)).unwrap(), rat(1, 2));
        }
        for idx in BellIndex::ALL {
            assert_eq!(enumerate_exact(code(2, 2), idx, &rat(0, 1)).unwrap(), rat(0, 1));
        }
    }

    #[test]
    fn enumerate_rejects_oversized_codes_and_bad_eta() {
        assert!(matches!(
            enumerate_exact(code(17, 1), BellIndex::new(0, 0), &rat(1, 2)),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(matches!(
            enumerate_exact(code(2, 2), BellIndex::new(0, 0), &rat(3, 2)),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
    }

    #[test]
    fn sample_rejects_bad_input() {
        assert_eq!(sample_bm(code(1, 1), BellIndex::new(0, 0), 0.5, 0, 1), Err(Error::NoTrials));
        assert!(sample_bm(code(1, 1), BellIndex::new(0, 0), 1.5, 10, 1).is_err());
    }

    #[test]
    fn sample_total_loss_never_succeeds() {
        let s = sample_bm(code(3, 3), BellIndex::new(1, 0), 0.0, 1000, 3).unwrap();
        assert_eq!(s.successes, 0);
        assert_eq!(s.estimate, 0.0);
    }

    #[test]
    fn sample_single_pair_lossless() {
        let s = sample_bm(code(1, 1), BellIndex::new(1, 1), 1.0, 100, 0).unwrap();
        assert_eq!(s.successes, 100);
        let s = sample_bm(code(1, 1), BellIndex::new(0, 1), 1.0, 100, 0).unwrap();
        assert_eq!(s.successes, 0);
    }

    #[test]
    fn random_parity_bits_respects_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for len in 1..=20 {
            for parity in 0..2 {
                let v = random_parity_bits(&mut rng, len, parity);
                assert!(v < 1 << len);
                assert_eq!((v.count_ones() & 1) as u8, parity);
            }
        }
    }

    #[test]
    fn audit_small_code() {
        let report = audit_soundness(code(2, 2), BellIndex::new(1, 1), Apparatus::LinearOptics).unwrap();
        assert_eq!(report.misidentified, 0);
        assert!(report.successes > 0);
    }
}
