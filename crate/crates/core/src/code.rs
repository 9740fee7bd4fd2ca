//! Code parameters, Bell indices and the decomposition of encoded Bell
//! states into lower-level Bell states.
//!
//! A QPC(n,m) logical qubit consists of `n` blocks of `m` dual-rail photons.
//! Bell states exist at three levels (physical, block, logical) and are all
//! labeled by two bits `(k, l)`:
//!
//! ```text
//! |phi_{k,l}> = ( |0,k> + (-1)^l |1,1-k> ) / sqrt(2)
//! ```
//!
//! After pairing photon `j` of one qubit with photon `j` of the other, a block
//! Bell state is a uniform superposition of products of physical Bell states
//! whose first index is always `k` and whose second indices have parity `l`.
//! A logical Bell state is the same construction one level up with the roles
//! of `k` and `l` exchanged. Relative signs of the terms are not tracked; the
//! measurement statistics only depend on which terms appear.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest bit-vector length [`index_set`] will enumerate.
pub const MAX_INDEX_SET_LENGTH: u32 = 24;

/// Parameters of QPC(n,m): `n` blocks of `m` physical qubits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u32, u32)", into = "(u32, u32)")]
pub struct CodeParams {
    n: u32,
    m: u32,
}

impl CodeParams {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidCode { n, m });
        }
        Ok(Self { n, m })
    }

    /// Number of blocks.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Physical qubits per block.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Physical qubits (photons) per logical qubit.
    pub fn photons(&self) -> u32 {
        self.n * self.m
    }

    /// Largest number of lost photons a logical Bell measurement can survive.
    pub fn max_loss(&self) -> u32 {
        (self.n - 1) * (self.m - 1)
    }
}

impl TryFrom<(u32, u32)> for CodeParams {
    type Error = Error;

    fn try_from((n, m): (u32, u32)) -> Result<Self> {
        Self::new(n, m)
    }
}

impl From<CodeParams> for (u32, u32) {
    fn from(code: CodeParams) -> Self {
        (code.n, code.m)
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

impl FromStr for CodeParams {
    type Err = String;

    /// Parses `n,m`, optionally wrapped in parentheses.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (n, m) = trimmed
            .split_once(',')
            .ok_or_else(|| format!("expected `n,m`, got `{s}`"))?;
        let n: u32 = n.trim().parse().map_err(|e| format!("bad n in `{s}`: {e}"))?;
        let m: u32 = m.trim().parse().map_err(|e| format!("bad m in `{s}`: {e}"))?;
        CodeParams::new(n, m).map_err(|e| e.to_string())
    }
}

/// Label `(k, l)` of a Bell state at any encoding level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BellIndex {
    k: u8,
    l: u8,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [
        BellIndex { k: 0, l: 0 },
        BellIndex { k: 0, l: 1 },
        BellIndex { k: 1, l: 0 },
        BellIndex { k: 1, l: 1 },
    ];

    /// # Panics
    /// If either index is not a bit.
    pub const fn new(k: u8, l: u8) -> Self {
        assert!(k <= 1 && l <= 1, "Bell indices are bits");
        Self { k, l }
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn l(&self) -> u8 {
        self.l
    }

    /// The same label with `k` and `l` exchanged.
    pub fn swapped(&self) -> Self {
        Self { k: self.l, l: self.k }
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi_{}{}", self.k, self.l)
    }
}

/// A bit vector of fixed length together with its parity.
///
/// Element 0 is the most significant bit of the packed word, so ordering by
/// the packed word is lexicographic ordering of the vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParityVector {
    word: u32,
    len: u8,
}

impl ParityVector {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.len(), "bit index {i} out of range");
        ((self.word >> (self.len() - 1 - i)) & 1) as u8
    }

    pub fn parity(&self) -> u8 {
        (self.word.count_ones() & 1) as u8
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.bit(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.bits().collect()
    }
}

impl fmt::Display for ParityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// All bit vectors of `length` whose bit sum is `parity` mod 2, in
/// lexicographic order. There are exactly `2^(length-1)` of them.
pub fn index_set(parity: u8, length: u32) -> Result<Vec<ParityVector>> {
    if length == 0 {
        return Err(Error::EmptyLength);
    }
    if length > MAX_INDEX_SET_LENGTH {
        return Err(Error::CapacityExceeded {
            what: "index set length",
            value: length as u64,
            limit: MAX_INDEX_SET_LENGTH as u64,
        });
    }
    let parity = u32::from(parity & 1);
    Ok((0..1u32 << length)
        .filter(|w| w.count_ones() & 1 == parity)
        .map(|word| ParityVector {
            word,
            len: length as u8,
        })
        .collect())
}

/// Terms of the block Bell state `phi_{k,l}^(m)` as `m`-tuples of physical
/// Bell indices `(k, r_j)` with `r` ranging over the vectors of parity `l`.
pub fn expand_block_bell(idx: BellIndex, m: u32) -> Result<Vec<Vec<BellIndex>>> {
    Ok(index_set(idx.l, m)?
        .into_iter()
        .map(|r| r.bits().map(|rj| BellIndex::new(idx.k, rj)).collect())
        .collect())
}

/// Terms of the logical Bell state `phi_{k,l}^(n,m)` as `n`-tuples of block
/// Bell indices `(s_i, l)` with `s` ranging over the vectors of parity `k`.
pub fn expand_logical_bell(idx: BellIndex, n: u32) -> Result<Vec<Vec<BellIndex>>> {
    Ok(index_set(idx.k, n)?
        .into_iter()
        .map(|s| s.bits().map(|si| BellIndex::new(si, idx.l)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vectors(parity: u8, len: u32) -> Vec<Vec<u8>> {
        index_set(parity, len).unwrap().iter().map(|v| v.to_vec()).collect()
    }

    fn b(k: u8, l: u8) -> BellIndex {
        BellIndex::new(k, l)
    }

    #[test]
    fn index_set_small_cases() {
        assert_eq!(vectors(0, 1), vec![vec![0]]);
        assert_eq!(vectors(1, 1), vec![vec![1]]);
        assert_eq!(vectors(1, 2), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn index_set_length_four_matches_filtered_enumeration() {
        let mut expected = Vec::new();
        for a in 0..2u8 {
            for b in 0..2u8 {
                for c in 0..2u8 {
                    for d in 0..2u8 {
                        if (a + b + c + d) % 2 == 0 {
                            expected.push(vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
        let got = vectors(0, 4);
        assert_eq!(got.len(), 8);
        assert_eq!(got, expected);
        assert!(got.contains(&vec![0, 0, 0, 0]));
        assert!(got.contains(&vec![1, 1, 1, 1]));
    }

    #[test]
    fn index_set_rejects_bad_lengths() {
        assert_eq!(index_set(0, 0), Err(Error::EmptyLength));
        assert!(matches!(
            index_set(1, MAX_INDEX_SET_LENGTH + 1),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn block_expansion_examples() {
        assert_eq!(expand_block_bell(b(1, 0), 1).unwrap(), vec![vec![b(1, 0)]]);
        assert_eq!(
            expand_block_bell(b(0, 1), 2).unwrap(),
            vec![vec![b(0, 0), b(0, 1)], vec![b(0, 1), b(0, 0)]]
        );
        let terms = expand_block_bell(b(1, 0), 3).unwrap();
        let seconds: Vec<Vec<u8>> = terms.iter().map(|t| t.iter().map(|x| x.l()).collect()).collect();
        assert_eq!(
            seconds,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );
        assert!(terms.iter().flatten().all(|x| x.k() == 1));
    }

    #[test]
    fn logical_expansion_examples() {
        assert_eq!(expand_logical_bell(b(0, 0), 1).unwrap(), vec![vec![b(0, 0)]]);
        assert_eq!(
            expand_logical_bell(b(1, 0), 2).unwrap(),
            vec![vec![b(0, 0), b(1, 0)], vec![b(1, 0), b(0, 0)]]
        );
        let terms = expand_logical_bell(b(0, 1), 3).unwrap();
        let firsts: Vec<Vec<u8>> = terms.iter().map(|t| t.iter().map(|x| x.k()).collect()).collect();
        assert_eq!(
            firsts,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );
        assert!(terms.iter().flatten().all(|x| x.l() == 1));
    }

    #[test]
    fn code_params_parse_and_validate() {
        assert_eq!("23,5".parse::<CodeParams>().unwrap(), CodeParams::new(23, 5).unwrap());
        assert_eq!("(3, 10)".parse::<CodeParams>().unwrap(), CodeParams::new(3, 10).unwrap());
        assert!("0,3".parse::<CodeParams>().is_err());
        assert!("7".parse::<CodeParams>().is_err());
        assert_eq!(CodeParams::new(0, 1), Err(Error::InvalidCode { n: 0, m: 1 }));
        let code = CodeParams::new(7, 4).unwrap();
        assert_eq!(code.photons(), 28);
        assert_eq!(code.max_loss(), 18);
        assert_eq!(code.to_string(), "(7,4)");
    }
}
