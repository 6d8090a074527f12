//! Exact decision of `(k, l)`-freeness for circulants.
//!
//! A plus-circulant contains an all-ones `k × l` block on rows `a_1..a_k` and
//! columns `b_1..b_l` iff every `a_i + b_j` (reduced mod `n`) lies in the row
//! support `S`. Translating rows down and columns up by `a_1` keeps a block a
//! block, so the search fixes `a_1 = 0` and walks increasing offset tuples
//! `0 = d_1 < d_2 < … < d_k`, maintaining `T = ∩_i (S − d_i)`. A tuple is a
//! witness once `|T| ≥ l`; a prefix is abandoned as soon as `|T| < l`.
//!
//! Two flavours of `S − d` exist:
//!
//! * integer sums: `{x − d : x ∈ S, x ≥ d}`, used on the `N`-capacity support
//!   of the padded `2N × 2N` matrix (every block of that matrix translates to
//!   one whose sums never wrap);
//! * cyclic: `{(x − d) mod n : x ∈ S}`, the literal matrix condition.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::circulant::{CirculantMatrix, Orientation, SupportSet};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreenessMode {
    IntegerSums,
    Cyclic,
}

impl fmt::Display for FreenessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FreenessMode::IntegerSums => "integer_sums",
            FreenessMode::Cyclic => "cyclic",
        })
    }
}

/// Shape of the forbidden block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreenessQuery {
    pub k: usize,
    pub l: usize,
    pub mode: FreenessMode,
}

impl FreenessQuery {
    pub fn new(k: usize, l: usize, mode: FreenessMode) -> Result<Self> {
        if k < 2 || l < 2 {
            return Err(invalid!(
                "block shape must satisfy k, l >= 2 (got {k} x {l})"
            ));
        }
        Ok(Self { k, l, mode })
    }
}

/// Rows and columns of an all-ones block, both ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub rows: Vec<u64>,
    pub cols: Vec<u64>,
    pub mode: FreenessMode,
}

impl Witness {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Re-checks the witness against a support by direct lookups.
    pub fn holds_for_support(&self, support: &SupportSet) -> bool {
        let n = support.capacity();
        let distinct = |v: &[u64]| v.windows(2).all(|w| w[0] < w[1]);
        if !distinct(&self.rows) || !distinct(&self.cols) {
            return false;
        }
        if self.rows.iter().chain(&self.cols).any(|&x| x >= n) {
            return false;
        }
        self.rows.iter().all(|&a| {
            self.cols.iter().all(|&b| match self.mode {
                FreenessMode::IntegerSums => support.contains(a + b),
                FreenessMode::Cyclic => support.contains((a + b) % n),
            })
        })
    }

    /// Re-checks the witness against matrix entries.
    pub fn holds_for_matrix(&self, m: &CirculantMatrix) -> bool {
        let distinct = |v: &[u64]| v.windows(2).all(|w| w[0] < w[1]);
        distinct(&self.rows)
            && distinct(&self.cols)
            && self
                .rows
                .iter()
                .all(|&i| self.cols.iter().all(|&j| m.entry(i, j).unwrap_or(false)))
    }
}

/// Result of a budgeted search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Free,
    Block(Witness),
    BudgetExhausted { spent: u64 },
}

impl Verdict {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Block(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Verdict::Free)
    }

    pub fn into_result(self) -> Result<Option<Witness>> {
        match self {
            Verdict::Free => Ok(None),
            Verdict::Block(w) => Ok(Some(w)),
            Verdict::BudgetExhausted { spent } => Err(Error::BudgetExhausted { spent }),
        }
    }
}

/// Engineering limits for the exact search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of shifted-intersection operations per query.
    pub max_ops: u64,
    /// Largest accepted row count `k`.
    pub max_k: usize,
    /// Largest matrix order accepted by the naive oracle.
    pub naive_max_n: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_ops: 50_000_000,
            max_k: 6,
            naive_max_n: 32,
        }
    }
}

/// Searches for rows `a` and columns `b` in `[0, N)` with every plain sum
/// `a_i + b_j` in `S`.
pub fn find_rectangle_integer(s: &SupportSet, k: usize, l: usize) -> Result<Option<Witness>> {
    verify_support(s, k, l, &SearchLimits::default())?.into_result()
}

/// Cyclic freeness of a plus-circulant.
pub fn is_free_cyclic(m: &CirculantMatrix, k: usize, l: usize) -> Result<Option<Witness>> {
    verify_matrix(m, k, l, &SearchLimits::default())?.into_result()
}

pub fn verify_matrix(
    m: &CirculantMatrix,
    k: usize,
    l: usize,
    limits: &SearchLimits,
) -> Result<Verdict> {
    if m.orientation() != Orientation::Plus {
        return Err(Error::UnsupportedMode(
            "the offset search needs a plus-oriented circulant".into(),
        ));
    }
    check_shape(k, l, limits)?;
    Ok(search_support(m.row(), k, l, FreenessMode::Cyclic, limits))
}

pub fn verify_support(
    s: &SupportSet,
    k: usize,
    l: usize,
    limits: &SearchLimits,
) -> Result<Verdict> {
    check_shape(k, l, limits)?;
    Ok(search_support(s, k, l, FreenessMode::IntegerSums, limits))
}

fn check_shape(k: usize, l: usize, limits: &SearchLimits) -> Result<()> {
    FreenessQuery::new(k, l, FreenessMode::Cyclic)?;
    if k > limits.max_k {
        return Err(invalid!(
            "k = {k} exceeds the configured search limit {}",
            limits.max_k
        ));
    }
    Ok(())
}

fn search_support(
    s: &SupportSet,
    k: usize,
    l: usize,
    mode: FreenessMode,
    limits: &SearchLimits,
) -> Verdict {
    if k < 2 || l < 2 {
        // Degenerate shapes are rejected by the public entry points; the
        // integer helper also guards here because it skips `check_shape`.
        return Verdict::Free;
    }
    let n = s.capacity() as usize;
    if s.len() < k.max(l) {
        return Verdict::Free;
    }
    let bits = s.to_bitset();
    let offsets = admissible_offsets(s, &bits, l, mode);
    if offsets.len() < k - 1 {
        return Verdict::Free;
    }
    let mut levels = vec![Bitset::new(n); k];
    levels[0] = bits.clone();
    let mut search = OffsetSearch {
        support: &bits,
        offsets: &offsets,
        k,
        l,
        mode,
        budget: limits.max_ops,
        spent: 0,
        chosen: vec![0],
        levels,
    };
    match search.descend(1, 0) {
        Outcome::Found => {
            let rows = search.chosen.iter().map(|&d| d as u64).collect();
            let cols = search.levels[k - 1]
                .iter()
                .take(l)
                .map(|c| c as u64)
                .collect();
            Verdict::Block(Witness { rows, cols, mode })
        }
        Outcome::Exhausted => Verdict::BudgetExhausted {
            spent: search.spent,
        },
        Outcome::None => Verdict::Free,
    }
}

/// Offsets `d > 0` with `|S ∩ (S − d)| ≥ l`, ascending.
///
/// Any pair of rows in a block differs by such an offset, so no other value
/// can appear in a witness tuple.
fn admissible_offsets(s: &SupportSet, bits: &Bitset, l: usize, mode: FreenessMode) -> Vec<usize> {
    let n = s.capacity() as usize;
    let m = s.len();
    let mut admissible: Vec<usize> = if m.saturating_mul(m) <= n.saturating_mul(n.div_ceil(64)) {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        let members = s.members();
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                let d = (y - x) as usize;
                *counts.entry(d).or_default() += 1;
                if mode == FreenessMode::Cyclic {
                    *counts.entry(n - d).or_default() += 1;
                }
            }
        }
        counts
            .into_iter()
            .filter(|&(_, c)| c >= l)
            .map(|(d, _)| d)
            .collect()
    } else {
        let mut out = Bitset::new(n);
        (1..n)
            .filter(|&d| {
                let c = match mode {
                    FreenessMode::IntegerSums => bits.and_shifted_down(bits, d, &mut out),
                    FreenessMode::Cyclic => bits.and_rotated_down(bits, d, &mut out),
                };
                c >= l
            })
            .collect()
    };
    admissible.sort_unstable();
    admissible
}

enum Outcome {
    Found,
    Exhausted,
    None,
}

struct OffsetSearch<'a> {
    support: &'a Bitset,
    offsets: &'a [usize],
    k: usize,
    l: usize,
    mode: FreenessMode,
    budget: u64,
    spent: u64,
    chosen: Vec<usize>,
    /// `levels[j]` is the intersection over the first `j + 1` chosen offsets.
    levels: Vec<Bitset>,
}

impl OffsetSearch<'_> {
    fn descend(&mut self, depth: usize, from: usize) -> Outcome {
        if depth == self.k {
            return Outcome::Found;
        }
        let still_needed = self.k - depth;
        for idx in from..self.offsets.len() {
            if self.offsets.len() - idx < still_needed {
                break;
            }
            if self.spent >= self.budget {
                return Outcome::Exhausted;
            }
            self.spent += 1;
            let d = self.offsets[idx];
            let (done, rest) = self.levels.split_at_mut(depth);
            let (current, next) = (&done[depth - 1], &mut rest[0]);
            let size = match self.mode {
                FreenessMode::IntegerSums => current.and_shifted_down(self.support, d, next),
                FreenessMode::Cyclic => current.and_rotated_down(self.support, d, next),
            };
            if size < self.l {
                continue;
            }
            self.chosen.push(d);
            match self.descend(depth + 1, idx + 1) {
                Outcome::None => {}
                done => return done,
            }
            self.chosen.pop();
        }
        Outcome::None
    }
}

/// Exhaustive oracle: scans row subsets in lexicographic order and returns
/// the first whose common one-columns number at least `l` (columns are the
/// smallest `l` of them). Works for either orientation.
pub fn find_block_naive(m: &CirculantMatrix, k: usize, l: usize) -> Result<Option<Witness>> {
    find_block_naive_with_limit(m, k, l, SearchLimits::default().naive_max_n)
}

pub fn find_block_naive_with_limit(
    m: &CirculantMatrix,
    k: usize,
    l: usize,
    max_n: u64,
) -> Result<Option<Witness>> {
    FreenessQuery::new(k, l, FreenessMode::Cyclic)?;
    let n = m.n();
    if n > max_n {
        return Err(invalid!("naive scan refuses order {n} (limit {max_n})"));
    }
    let rows: Vec<Bitset> = (0..n)
        .map(|i| Bitset::from_indices(n as usize, m.row_ones(i).map(|j| j as usize)))
        .collect();
    let mut chosen = Vec::with_capacity(k);
    let all = Bitset::from_indices(n as usize, 0..n as usize);
    Ok(
        naive_descend(&rows, &all, k, l, 0, &mut chosen).map(|cols| Witness {
            rows: chosen.iter().map(|&r| r as u64).collect(),
            cols,
            mode: FreenessMode::Cyclic,
        }),
    )
}

fn naive_descend(
    rows: &[Bitset],
    common: &Bitset,
    k: usize,
    l: usize,
    from: usize,
    chosen: &mut Vec<usize>,
) -> Option<Vec<u64>> {
    if chosen.len() == k {
        return Some(common.iter().take(l).map(|c| c as u64).collect());
    }
    for r in from..rows.len() {
        if rows.len() - r < k - chosen.len() {
            break;
        }
        let mut next = common.clone();
        next.and_assign(&rows[r]);
        if next.count() < l {
            continue;
        }
        chosen.push(r);
        if let Some(cols) = naive_descend(rows, &next, k, l, r + 1, chosen) {
            return Some(cols);
        }
        chosen.pop();
    }
    None
}
