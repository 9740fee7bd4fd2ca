//! Fock-space model of the physical Bell measurement: two polarization
//! qubits meet at a 50:50 beam splitter, each output arm is split by a
//! polarizing beam splitter, and four number-resolving detectors count
//! photons.
//!
//! Modes are ordered `[aH, aV, bH, bV]` where `a`/`b` are the two spatial
//! inputs (or outputs) and `H`/`V` the polarizations. The state space is
//! every occupation of the four modes with at most two photons.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bm::{physical_bm, PhysicalOutcome};
use crate::code::BellIndex;
use crate::error::{Error, Result};

pub const MODES: usize = 4;
pub const MAX_PHOTONS: u8 = 2;
/// Tolerance for normalization and distribution equality.
pub const TOLERANCE: f64 = 1e-12;

type Occupation = [u8; MODES];

fn mode(spatial: usize, polarization: usize) -> usize {
    2 * spatial + polarization
}

fn basis() -> &'static [Occupation] {
    static BASIS: OnceLock<Vec<Occupation>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut out = Vec::new();
        for total in 0..=MAX_PHOTONS {
            for a in 0..=total {
                for b in 0..=total - a {
                    for c in 0..=total - a - b {
                        out.push([a, b, c, total - a - b - c]);
                    }
                }
            }
        }
        out.sort();
        out
    })
}

fn basis_index(occ: &Occupation) -> usize {
    basis().binary_search(occ).expect("occupation outside the truncated space")
}

fn factorial(k: u8) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Pure state on the four modes, dense over the 15 basis occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum() -> Self {
        let mut s = Self::zero();
        s.amplitudes[basis_index(&[0; MODES])] = Complex64::new(1.0, 0.0);
        s
    }

    fn zero() -> Self {
        Self {
            amplitudes: vec![Complex64::new(0.0, 0.0); basis().len()],
        }
    }

    /// Basis state with the given photon numbers.
    pub fn basis_state(occupation: [u8; MODES]) -> Self {
        let mut s = Self::zero();
        s.amplitudes[basis_index(&occupation)] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn dimension() -> usize {
        basis().len()
    }

    pub fn amplitude(&self, occupation: [u8; MODES]) -> Complex64 {
        self.amplitudes[basis_index(&occupation)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Occupation, Complex64)> + '_ {
        basis().iter().copied().zip(self.amplitudes.iter().copied())
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
        self
    }

    /// Remove one photon from `mode` (unnormalized `a_mode |psi>`).
    fn annihilate(&self, mode: usize) -> Self {
        let mut out = Self::zero();
        for (occ, amp) in self.iter() {
            if occ[mode] == 0 || amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut lower = occ;
            lower[mode] -= 1;
            out.amplitudes[basis_index(&lower)] += amp * f64::from(occ[mode]).sqrt();
        }
        out
    }

    /// Apply the passive linear map `a_i^dag -> sum_j u[j][i] a_j^dag`.
    pub fn transform(&self, u: &ModeMatrix) -> Self {
        let mut out = Self::zero();
        for (occ, amp) in self.iter() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let photons: Vec<usize> = (0..MODES)
                .flat_map(|i| (0..occ[i]).map(move |_| i))
                .collect();
            let prefactor = amp / occ.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
            // Expand the product of creation operators over every choice of
            // output mode per photon.
            let choices = MODES.pow(photons.len() as u32);
            for choice in 0..choices {
                let mut out_occ = [0u8; MODES];
                let mut coefficient = prefactor;
                let mut rest = choice;
                for &input in &photons {
                    let output = rest % MODES;
                    rest /= MODES;
                    out_occ[output] += 1;
                    coefficient *= u.0[output][input];
                }
                let norm = out_occ.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
                out.amplitudes[basis_index(&out_occ)] += coefficient * norm;
            }
        }
        out
    }
}

/// Single-photon mode transformation; column `i` is the image of mode `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix(pub [[Complex64; MODES]; MODES]);

impl ModeMatrix {
    pub fn adjoint(&self) -> Self {
        let mut out = [[Complex64::new(0.0, 0.0); MODES]; MODES];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.0[j][i].conj();
            }
        }
        Self(out)
    }
}

/// Phase convention of the polarization-preserving 50:50 beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BeamSplitter {
    /// `a -> (a+b)/sqrt2`, `b -> (a-b)/sqrt2`.
    #[default]
    SymmetricReal,
    /// `a -> (a+ib)/sqrt2`, `b -> (ia+b)/sqrt2`.
    Imaginary,
}

impl BeamSplitter {
    pub fn matrix(self) -> ModeMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (aa, ab, ba, bb) = match self {
            BeamSplitter::SymmetricReal => (
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ),
            BeamSplitter::Imaginary => (
                Complex64::new(h, 0.0),
                Complex64::new(0.0, h),
                Complex64::new(0.0, h),
                Complex64::new(h, 0.0),
            ),
        };
        let mut u = [[Complex64::new(0.0, 0.0); MODES]; MODES];
        for pol in 0..2 {
            let (a, b) = (mode(0, pol), mode(1, pol));
            // column = input mode, row = output mode
            u[a][a] = aa;
            u[b][a] = ab;
            u[a][b] = ba;
            u[b][b] = bb;
        }
        ModeMatrix(u)
    }
}

/// `phi_{k,l} = (|0,k> + (-1)^l |1,1-k>)/sqrt2` with `0 = H`, `1 = V`,
/// qubit A in spatial mode `a` and qubit B in spatial mode `b`.
pub fn bell_state_vector(idx: BellIndex) -> FockState {
    let pair = |x: usize, y: usize| {
        let mut occ = [0u8; MODES];
        occ[mode(0, x)] += 1;
        occ[mode(1, y)] += 1;
        occ
    };
    let k = idx.k() as usize;
    let sign = if idx.l() == 0 { 1.0 } else { -1.0 };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = FockState::zero();
    s.amplitudes[basis_index(&pair(0, k))] += Complex64::new(h, 0.0);
    s.amplitudes[basis_index(&pair(1, 1 - k))] += Complex64::new(sign * h, 0.0);
    s
}

pub fn apply_beamsplitter(state: &FockState) -> FockState {
    state.transform(&BeamSplitter::SymmetricReal.matrix())
}

/// Photon counts of the four detectors `[cH, cV, dH, dV]` behind the
/// polarizing beam splitters of output arms `c` and `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClickPattern(pub [u8; MODES]);

impl ClickPattern {
    pub fn total(&self) -> u8 {
        self.0.iter().sum()
    }
}

impl fmt::Display for ClickPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [ch, cv, dh, dv] = self.0;
        write!(f, "cH={ch} cV={cv} dH={dh} dV={dv}")
    }
}

/// Statistical mixture of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture(pub Vec<(f64, FockState)>);

impl From<FockState> for Mixture {
    fn from(state: FockState) -> Self {
        Mixture(vec![(1.0, state)])
    }
}

pub type Distribution = BTreeMap<ClickPattern, f64>;

/// Photon-number statistics of the detectors for a state already in the
/// detection basis.
pub fn detection_distribution(state: impl Into<Mixture>) -> Distribution {
    let mut out = Distribution::new();
    for (weight, pure) in state.into().0 {
        for (occ, amp) in pure.iter() {
            let p = weight * amp.norm_sqr();
            if p > 0.0 {
                *out.entry(ClickPattern(occ)).or_default() += p;
            }
        }
    }
    out
}

/// Loses the photon in spatial mode `spatial`, leaving a mixture over the
/// polarization it carried.
fn lose_photon(mixture: Mixture, spatial: usize) -> Mixture {
    let mut out = Vec::new();
    for (weight, state) in mixture.0 {
        for pol in 0..2 {
            let reduced = state.annihilate(mode(spatial, pol));
            let norm = reduced.norm_squared();
            if norm > TOLERANCE {
                out.push((weight * norm, reduced.scaled(1.0 / norm.sqrt())));
            }
        }
    }
    Mixture(out)
}

/// Click statistics of `phi_idx` after losing photon A and/or B in front of
/// the beam splitter.
pub fn lossy_distribution(idx: BellIndex, keep_a: bool, keep_b: bool) -> Distribution {
    lossy_distribution_with(BeamSplitter::default(), idx, keep_a, keep_b)
}

pub fn lossy_distribution_with(bs: BeamSplitter, idx: BellIndex, keep_a: bool, keep_b: bool) -> Distribution {
    let mut mixture = Mixture::from(bell_state_vector(idx));
    if !keep_a {
        mixture = lose_photon(mixture, 0);
    }
    if !keep_b {
        mixture = lose_photon(mixture, 1);
    }
    let u = bs.matrix();
    let after = Mixture(mixture.0.into_iter().map(|(w, s)| (w, s.transform(&u))).collect());
    detection_distribution(after)
}

fn support(dist: &Distribution) -> BTreeSet<ClickPattern> {
    dist.iter().filter(|(_, &p)| p > TOLERANCE).map(|(&c, _)| c).collect()
}

fn distributions_equal(a: &Distribution, b: &Distribution) -> bool {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .all(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs() <= TOLERANCE)
}

/// Decision table from click patterns to physical outcomes, certified
/// against the optics model.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    pub entries: BTreeMap<ClickPattern, PhysicalOutcome>,
    /// Probability of identifying both indices without loss, averaged over
    /// the four Bell states.
    pub lossless_efficiency: f64,
}

impl PatternTable {
    /// Outcome the detectors announce, or `None` for a pattern that never
    /// occurs.
    pub fn classify(&self, pattern: &ClickPattern) -> Option<PhysicalOutcome> {
        self.entries.get(pattern).copied()
    }

    /// The single outcome produced by `phi_idx` with the given photons
    /// present. Errors if different patterns in its support disagree.
    pub fn outcome_for(&self, idx: BellIndex, keep_a: bool, keep_b: bool) -> Result<PhysicalOutcome> {
        let labels: BTreeSet<_> = support(&lossy_distribution(idx, keep_a, keep_b))
            .iter()
            .map(|c| self.classify(c))
            .collect();
        match labels.into_iter().collect::<Vec<_>>().as_slice() {
            [Some(o)] => Ok(*o),
            other => Err(Error::OpticsInconsistency(format!(
                "{idx} with photons ({keep_a}, {keep_b}) maps to {other:?}"
            ))),
        }
    }
}

/// Build and certify the click-pattern decision table.
pub fn classify_patterns() -> Result<PatternTable> {
    classify_patterns_with(BeamSplitter::default())
}

pub fn classify_patterns_with(bs: BeamSplitter) -> Result<PatternTable> {
    let lossless: Vec<(BellIndex, Distribution)> = BellIndex::ALL
        .iter()
        .map(|&idx| (idx, lossy_distribution_with(bs, idx, true, true)))
        .collect();

    for (idx, dist) in &lossless {
        let total: f64 = dist.values().sum();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::OpticsInconsistency(format!("{idx} distribution sums to {total}")));
        }
    }
    if !distributions_equal(&lossless[0].1, &lossless[1].1) {
        return Err(Error::OpticsInconsistency("phi_00 and phi_01 are distinguishable".into()));
    }

    let mut entries = BTreeMap::new();
    let patterns: BTreeSet<ClickPattern> = lossless.iter().flat_map(|(_, d)| support(d)).collect();
    for pattern in patterns {
        let states: Vec<BellIndex> = lossless
            .iter()
            .filter(|(_, d)| d.get(&pattern).copied().unwrap_or(0.0) > TOLERANCE)
            .map(|(idx, _)| *idx)
            .collect();
        let outcome = match states.as_slice() {
            [only] if only.k() == 1 => PhysicalOutcome::FullyIdentified { k: 1, l: only.l() },
            [x, y] if x.k() == 0 && y.k() == 0 => PhysicalOutcome::KOnlyIdentified { k: 0 },
            other => {
                return Err(Error::OpticsInconsistency(format!(
                    "pattern {pattern} occurs for {other:?}"
                )))
            }
        };
        if pattern.total() != 2 {
            return Err(Error::OpticsInconsistency(format!(
                "lossless pattern {pattern} does not show two photons"
            )));
        }
        entries.insert(pattern, outcome);
    }

    // With a photon missing, every Bell state must produce the same clicks.
    for (keep_a, keep_b) in [(true, false), (false, true), (false, false)] {
        let dists: Vec<Distribution> = BellIndex::ALL
            .iter()
            .map(|&idx| lossy_distribution_with(bs, idx, keep_a, keep_b))
            .collect();
        if !dists.windows(2).all(|w| distributions_equal(&w[0], &w[1])) {
            return Err(Error::OpticsInconsistency(format!(
                "photons present ({keep_a}, {keep_b}) still distinguish Bell states"
            )));
        }
        for pattern in support(&dists[0]) {
            if let Some(previous) = entries.insert(pattern, PhysicalOutcome::Erasure) {
                if previous == PhysicalOutcome::Erasure {
                    continue;
                }
                return Err(Error::OpticsInconsistency(format!(
                    "pattern {pattern} seen both with and without loss"
                )));
            }
        }
    }

    let lossless_efficiency = lossless
        .iter()
        .map(|(_, dist)| {
            dist.iter()
                .filter(|(c, _)| matches!(entries.get(c), Some(PhysicalOutcome::FullyIdentified { .. })))
                .map(|(_, p)| p)
                .sum::<f64>()
        })
        .sum::<f64>()
        / 4.0;

    Ok(PatternTable {
        entries,
        lossless_efficiency,
    })
}

/// Checks that the optics model reproduces [`physical_bm`] for every Bell
/// state and photon-presence combination.
pub fn certify_physical_bm(table: &PatternTable) -> Result<()> {
    for idx in BellIndex::ALL {
        for (keep_a, keep_b) in [(true, true), (true, false), (false, true), (false, false)] {
            let optics = table.outcome_for(idx, keep_a, keep_b)?;
            let model = physical_bm(idx, keep_a, keep_b);
            if optics != model {
                return Err(Error::OpticsInconsistency(format!(
                    "{idx} ({keep_a}, {keep_b}): optics gives {optics:?}, model gives {model:?}"
                )));
            }
        }
    }
    Ok(())
}
