//! Support sets and the circulant matrices they induce.
//!
//! A circulant of order `n` is stored only through the support of its first
//! row. Entry `(i, j)` is the membership of `(i + j) mod n` (orientation
//! [`Orientation::Plus`]) or of `(i − j) mod n` ([`Orientation::Minus`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::error::{invalid, Error, Result};

/// Version tag for the matrix JSON layout.
pub const MATRIX_FORMAT_VERSION: &str = "matrix-json/1";

/// A set of indices in `[0, capacity)`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportSet {
    capacity: u64,
    members: Vec<u64>,
}

impl SupportSet {
    /// Builds a support from arbitrary-order members.
    ///
    /// Duplicates and out-of-range members are rejected rather than merged or
    /// clipped.
    pub fn new(capacity: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(invalid!("duplicate support member {}", w[0]));
        }
        if let Some(&last) = members.last() {
            if last >= capacity {
                return Err(invalid!("support member {last} outside [0, {capacity})"));
            }
        }
        Ok(Self { capacity, members })
    }

    pub fn empty(capacity: u64) -> Self {
        Self {
            capacity,
            members: Vec::new(),
        }
    }

    pub fn full(capacity: u64) -> Self {
        Self {
            capacity,
            members: (0..capacity).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(capacity: u64, members: Vec<u64>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.last().is_none_or(|&m| m < capacity));
        Self { capacity, members }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub(crate) fn to_bitset(&self) -> Bitset {
        Bitset::from_indices(
            self.capacity as usize,
            self.members.iter().map(|&m| m as usize),
        )
    }

    /// Hex encoding: bit `j` is bit `j mod 8` of byte `j div 8`.
    pub fn to_hex(&self) -> String {
        let mut bytes = vec![0u8; self.capacity.div_ceil(8) as usize];
        for &m in &self.members {
            bytes[(m / 8) as usize] |= 1 << (m % 8);
        }
        hex::encode(bytes)
    }

    pub fn from_hex(capacity: u64, text: &str) -> Result<Self> {
        let bytes = hex::decode(text).map_err(|e| invalid!("support_hex: {e}"))?;
        let want = capacity.div_ceil(8) as usize;
        if bytes.len() != want {
            return Err(invalid!(
                "support_hex has {} bytes, expected {want} for n = {capacity}",
                bytes.len()
            ));
        }
        let mut members = Vec::new();
        for (bi, &byte) in bytes.iter().enumerate() {
            for bit in 0..8 {
                if byte >> bit & 1 == 1 {
                    let idx = bi as u64 * 8 + bit;
                    if idx >= capacity {
                        return Err(invalid!("support_hex sets bit {idx} beyond n = {capacity}"));
                    }
                    members.push(idx);
                }
            }
        }
        Ok(Self { capacity, members })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Plus,
    Minus,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Plus => "plus",
            Orientation::Minus => "minus",
        })
    }
}

/// Ones per row and in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightReport {
    pub weight: u64,
    pub row_weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CirculantMatrix {
    orientation: Orientation,
    row: SupportSet,
}

impl CirculantMatrix {
    pub fn new(row: SupportSet, orientation: Orientation) -> Result<Self> {
        if row.capacity() == 0 {
            return Err(invalid!("circulant order must be at least 1"));
        }
        Ok(Self { orientation, row })
    }

    pub fn plus(row: SupportSet) -> Result<Self> {
        Self::new(row, Orientation::Plus)
    }

    /// Order-`2N` plus-circulant whose first row is `S` followed by `N` zeros.
    ///
    /// The upper-left `N × N` block is the designated block: the matrix is
    /// `(k, l)`-free iff that block is.
    pub fn embed_double(support: &SupportSet) -> Result<Self> {
        let n = support.capacity();
        if n == 0 {
            return Err(invalid!("cannot embed a support of capacity 0"));
        }
        let doubled = n
            .checked_mul(2)
            .ok_or_else(|| invalid!("order 2·{n} overflows"))?;
        Self::plus(SupportSet::from_sorted_unchecked(
            doubled,
            support.members().to_vec(),
        ))
    }

    pub fn n(&self) -> u64 {
        self.row.capacity()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn row(&self) -> &SupportSet {
        &self.row
    }

    pub fn entry(&self, i: u64, j: u64) -> Result<bool> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(invalid!("index ({i}, {j}) outside a matrix of order {n}"));
        }
        Ok(self.entry_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn entry_unchecked(&self, i: u64, j: u64) -> bool {
        let n = self.n();
        let idx = match self.orientation {
            Orientation::Plus => (i + j) % n,
            Orientation::Minus => (i + (n - j)) % n,
        };
        self.row.contains(idx)
    }

    /// Column indices holding a one in row `i`.
    pub fn row_ones(&self, i: u64) -> impl Iterator<Item = u64> + '_ {
        let n = self.n();
        self.row
            .members()
            .iter()
            .map(move |&c| match self.orientation {
                // c = (i + j) mod n  =>  j = (c − i) mod n
                Orientation::Plus => (c + n - i % n) % n,
                // c = (i − j) mod n  =>  j = (i − c) mod n
                Orientation::Minus => (i % n + n - c) % n,
            })
    }

    pub fn weight(&self) -> WeightReport {
        let row_weight = self.row.len() as u64;
        WeightReport {
            weight: self.n() * row_weight,
            row_weight,
        }
    }

    pub fn to_json_value(&self, compact: bool) -> MatrixJson {
        MatrixJson {
            n: self.n(),
            orientation: self.orientation,
            support: Some(self.row.members().to_vec()),
            support_hex: compact.then(|| self.row.to_hex()),
        }
    }

    pub fn to_json(&self, compact: bool) -> Result<String> {
        Ok(serde_json::to_string(&self.to_json_value(compact))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MatrixJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

/// Wire form of a circulant matrix.
///
/// At least one of `support` / `support_hex` must be present; when both are,
/// they must describe the same row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: u64,
    pub orientation: Orientation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_hex: Option<String>,
}

impl TryFrom<MatrixJson> for CirculantMatrix {
    type Error = Error;

    fn try_from(raw: MatrixJson) -> Result<Self> {
        let from_list = match raw.support {
            Some(list) => {
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid!("support must be strictly ascending"));
                }
                Some(SupportSet::new(raw.n, list)?)
            }
            None => None,
        };
        let from_hex = raw
            .support_hex
            .as_deref()
            .map(|h| SupportSet::from_hex(raw.n, h))
            .transpose()?;
        let row = match (from_list, from_hex) {
            (Some(a), Some(b)) if a != b => {
                return Err(invalid!("support and support_hex disagree"))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(invalid!("matrix JSON needs support or support_hex")),
        };
        CirculantMatrix::new(row, raw.orientation)
    }
}
