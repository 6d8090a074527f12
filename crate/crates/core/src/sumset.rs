//! Minkowski sums of integer point sets and the minimum of `|A + B|` under
//! a dimension constraint.
//!
//! With `K = |A| ≤ |B| = L` and `dim(A + B) = n`, the minimum is either `KL`
//! (when `n = K + L − 2`) or is attained by a pair of long simplices sharing
//! the progression axis `e_1`. Such a pair is described by three spoke counts:
//! `s` spokes shared by both sets, `s_A` only in `A`, `s_B` only in `B`, with
//!
//! ```text
//! s + s_A + s_B = n − 1,   s + s_A ≤ K − 1,   s + s_B ≤ L − 1.
//! ```
//!
//! Its sumset has
//! `(s_B + 1)K + (s_A + 1)L + s·max(L − s_B, K − s_A) − n − s(s+1)/2 − s_A s_B`
//! points. Minimising that expression gives the closed forms in
//! [`min_sumset_size`]; [`min_sumset_by_partition_search`] minimises it by
//! enumeration, and [`min_sumset_grid_exhaustive`] checks small cases against
//! all point sets on a grid.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg;

pub type Point = Vec<i64>;

/// A finite set of integer vectors of a fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    dim: usize,
    points: BTreeSet<Point>,
}

impl PointSet {
    pub fn new(dim: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in points {
            if p.len() != dim {
                return Err(invalid!("point {p:?} does not have {dim} coordinates"));
            }
            if !set.insert(p) {
                return Err(invalid!("repeated point in point set"));
            }
        }
        Ok(Self { dim, points: set })
    }

    /// Like [`PointSet::new`] but merges repeated points.
    pub fn collect(dim: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in points {
            if p.len() != dim {
                return Err(invalid!("point {p:?} does not have {dim} coordinates"));
            }
            set.insert(p);
        }
        Ok(Self { dim, points: set })
    }

    fn from_set(dim: usize, points: BTreeSet<Point>) -> Self {
        Self { dim, points }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.contains(p)
    }
}

pub fn unit(dim: usize, axis: usize) -> Point {
    let mut p = vec![0; dim];
    p[axis - 1] = 1;
    p
}

pub fn minkowski_sum(a: &PointSet, b: &PointSet) -> Result<PointSet> {
    if a.dim != b.dim {
        return Err(invalid!(
            "Minkowski sum of sets in dimensions {} and {}",
            a.dim,
            b.dim
        ));
    }
    let sums = a
        .points
        .iter()
        .flat_map(|x| {
            b.points
                .iter()
                .map(move |y| x.iter().zip(y).map(|(u, v)| u + v).collect())
        })
        .collect();
    Ok(PointSet::from_set(a.dim, sums))
}

/// Dimension of the smallest affine subspace containing `p`, computed
/// exactly.
pub fn affine_dim(p: &PointSet) -> Result<usize> {
    let mut it = p.points.iter();
    let Some(base) = it.next() else {
        return Err(invalid!("affine dimension of an empty set"));
    };
    let rows: Vec<Vec<i128>> = it
        .map(|q| q.iter().zip(base).map(|(x, y)| (x - y) as i128).collect())
        .collect();
    Ok(linalg::rank(&rows))
}

fn check_sizes(n: usize, k: usize, l: usize) -> Result<()> {
    if n < 1 || k < 1 || k > l {
        return Err(invalid!(
            "need n >= 1 and 1 <= K <= L (got n={n}, K={k}, L={l})"
        ));
    }
    Ok(())
}

/// `nK + L − n(n+1)/2`.
pub fn ruzsa_bound(n: usize, k: usize, l: usize) -> Result<i64> {
    check_sizes(n, k, l)?;
    let (n, k, l) = (n as i64, k as i64, l as i64);
    Ok(n * k + l - n * (n + 1) / 2)
}

/// `L + Σ_{i=1}^{K−1} min(n, L − i)`.
pub fn ruzsa_refined_bound(n: usize, k: usize, l: usize) -> Result<i64> {
    check_sizes(n, k, l)?;
    let (n, l) = (n as i64, l as i64);
    Ok(l + (1..k as i64).map(|i| n.min(l - i)).sum::<i64>())
}

/// `{m·e_1 : 0 ≤ m ≤ size − k} ∪ {e_i : i ∈ spokes}` with `k − 1` spokes.
///
/// Axes are numbered from 1; spokes must avoid axis 1 and each other.
pub fn long_simplex(dim: usize, size: usize, spokes: &[usize]) -> Result<PointSet> {
    if size < 1 {
        return Err(invalid!("a long simplex has at least one point"));
    }
    if spokes.len() + 1 > size {
        return Err(invalid!(
            "{} spokes do not fit in {size} points",
            spokes.len()
        ));
    }
    let mut seen = BTreeSet::new();
    for &axis in spokes {
        if axis < 2 || axis > dim {
            return Err(invalid!("spoke axis {axis} outside 2..={dim}"));
        }
        if !seen.insert(axis) {
            return Err(invalid!("spoke axis {axis} repeated"));
        }
    }
    let run = size - spokes.len() - 1;
    if run > 0 && dim < 1 {
        return Err(invalid!("a progression needs at least one axis"));
    }
    let mut points: Vec<Point> = (0..=run as i64)
        .map(|m| {
            let mut p = vec![0; dim];
            if m > 0 {
                p[0] = m;
            }
            p
        })
        .collect();
    points.extend(spokes.iter().map(|&axis| unit(dim, axis)));
    PointSet::new(dim, points)
}

/// Spoke counts of a pair of long simplices on a common basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SimplexPair {
    pub k: usize,
    pub l: usize,
    pub s: usize,
    pub s_a: usize,
    pub s_b: usize,
}

impl SimplexPair {
    pub fn new(k: usize, l: usize, s: usize, s_a: usize, s_b: usize) -> Result<Self> {
        if k < 1 || k > l {
            return Err(invalid!("need 1 <= K <= L (got K={k}, L={l})"));
        }
        if s + s_a > k - 1 || s + s_b > l - 1 {
            return Err(invalid!(
                "spoke counts (s={s}, s_A={s_a}, s_B={s_b}) exceed K-1={} or L-1={}",
                k - 1,
                l - 1
            ));
        }
        Ok(Self { k, l, s, s_a, s_b })
    }

    /// Dimension of the ambient space, `s + s_A + s_B + 1`.
    pub fn n(&self) -> usize {
        self.s + self.s_a + self.s_b + 1
    }

    /// Points on the `e_1` progression of `A` and of `B`.
    pub fn progression_lengths(&self) -> (usize, usize) {
        (self.k - self.s - self.s_a, self.l - self.s - self.s_b)
    }

    /// Both progressions are `{0}`: `e_1` is unused and the sum only spans
    /// `n − 1` dimensions.
    pub fn is_degenerate(&self) -> bool {
        self.progression_lengths() == (1, 1)
    }

    pub fn formula_size(&self) -> u64 {
        let (k, l, s, sa, sb) = (
            self.k as i64,
            self.l as i64,
            self.s as i64,
            self.s_a as i64,
            self.s_b as i64,
        );
        let n = self.n() as i64;
        let v =
            (sb + 1) * k + (sa + 1) * l + s * (l - sb).max(k - sa) - n - s * (s + 1) / 2 - sa * sb;
        v as u64
    }

    /// `A = C_A ∪ D ∪ D_A`, `B = C_B ∪ D ∪ D_B` with `D = {e_2..e_{s+1}}`,
    /// `D_A = {e_{s+2}..e_{s+s_A+1}}`, `D_B = {e_{s+s_A+2}..e_n}`.
    pub fn construct(&self) -> (PointSet, PointSet) {
        let n = self.n();
        let shared: Vec<usize> = (2..self.s + 2).collect();
        let only_a: Vec<usize> = (self.s + 2..self.s + self.s_a + 2).collect();
        let only_b: Vec<usize> = (self.s + self.s_a + 2..=n).collect();
        let spokes_a: Vec<usize> = shared.iter().chain(&only_a).copied().collect();
        let spokes_b: Vec<usize> = shared.iter().chain(&only_b).copied().collect();
        let a = long_simplex(n, self.k, &spokes_a).expect("spoke counts validated");
        let b = long_simplex(n, self.l, &spokes_b).expect("spoke counts validated");
        (a, b)
    }
}

/// Closed-form `|A + B|` of the long-simplex pair with the given spoke counts.
///
/// Debug builds also build the pair and compare against the brute-force
/// Minkowski cardinality.
pub fn simplex_pair_sum_size(k: usize, l: usize, s: usize, s_a: usize, s_b: usize) -> Result<u64> {
    let pair = SimplexPair::new(k, l, s, s_a, s_b)?;
    let size = pair.formula_size();
    if cfg!(debug_assertions) {
        let (a, b) = pair.construct();
        let direct = minkowski_sum(&a, &b)?.len() as u64;
        if direct != size {
            return Err(Error::Internal(format!(
                "pair-sum formula {size} != construction {direct} for {pair:?}"
            )));
        }
    }
    Ok(size)
}

/// `(n, K, L)` with `K ≤ L` and `1 ≤ n ≤ K + L − 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SumsetBoundQuery {
    pub n: usize,
    pub k: usize,
    pub l: usize,
}

impl SumsetBoundQuery {
    pub fn new(n: usize, k: usize, l: usize) -> Result<Self> {
        if k < 1 || k > l {
            return Err(invalid!("need 1 <= K <= L (got K={k}, L={l})"));
        }
        if n < 1 || n + 2 > k + l {
            return Err(invalid!(
                "dimension n={n} outside [1, K+L-2] = [1, {}]",
                (k + l).saturating_sub(2)
            ));
        }
        Ok(Self { n, k, l })
    }
}

/// Which closed form produced a minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DimCase {
    /// `n = K + L − 2`: `KL`.
    Product,
    /// `n ≤ L − K`: `L + n(K − 1)`.
    Short,
    /// `L − K ≤ n ≤ L`: `(n+1)K − (n−L+K)(n−L+K+1)/2`.
    Middle,
    /// `L ≤ n ≤ K + L − 3`: `KL − (K+L−n)(K+L−n−1)/2`.
    Long,
}

/// Every closed form whose range contains `q.n`, with its value.
pub fn applicable_cases(q: &SumsetBoundQuery) -> Vec<(DimCase, u64)> {
    let (n, k, l) = (q.n as i64, q.k as i64, q.l as i64);
    let mut out = Vec::new();
    if n == k + l - 2 {
        out.push((DimCase::Product, (k * l) as u64));
    }
    if n <= l - k {
        out.push((DimCase::Short, (l + n * (k - 1)) as u64));
    }
    if l - k <= n && n <= l {
        let t = n - l + k;
        out.push((DimCase::Middle, ((n + 1) * k - t * (t + 1) / 2) as u64));
    }
    if l <= n && n <= k + l - 3 {
        let t = k + l - n;
        out.push((DimCase::Long, (k * l - t * (t - 1) / 2) as u64));
    }
    out
}

/// Minimum `|A + B|` by the closed forms.
///
/// `n = K + L − 2` is always the product case. Elsewhere, when `n` sits on a
/// boundary shared by two ranges both formulas are evaluated and must agree.
pub fn min_sumset_size(q: &SumsetBoundQuery) -> Result<u64> {
    min_sumset_case(q).map(|(_, v)| v)
}

pub fn min_sumset_case(q: &SumsetBoundQuery) -> Result<(DimCase, u64)> {
    let cases = applicable_cases(q);
    if let Some(&product) = cases.iter().find(|(c, _)| *c == DimCase::Product) {
        return Ok(product);
    }
    let (first, rest) = cases
        .split_first()
        .ok_or_else(|| Error::Internal(format!("no closed form covers {q:?}")))?;
    if let Some(other) = rest.iter().find(|(_, v)| *v != first.1) {
        return Err(Error::Internal(format!(
            "closed forms disagree at {q:?}: {first:?} vs {other:?}"
        )));
    }
    Ok(*first)
}

/// Minimum found by enumeration, with the spoke counts that attain it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionMinimum {
    pub value: u64,
    pub witness: SimplexPair,
}

/// Every spoke split `(s, s_A, s_B)` allowed for the query, `s` then `s_A`
/// ascending.
pub fn feasible_pairs(q: &SumsetBoundQuery) -> impl Iterator<Item = SimplexPair> + '_ {
    (0..q.n).flat_map(move |s| {
        (0..q.n - s)
            .filter_map(move |s_a| SimplexPair::new(q.k, q.l, s, s_a, q.n - 1 - s - s_a).ok())
    })
}

/// Minimum of the pair-sum formula over all feasible spoke splits; `KL`
/// when `n = K + L − 2`.
pub fn min_sumset_by_partition_search(q: &SumsetBoundQuery) -> Result<PartitionMinimum> {
    if q.n + 2 == q.k + q.l {
        // Independent simplices: A spans K−1 axes, B the progression plus L−2.
        let witness = SimplexPair::new(q.k, q.l, 0, q.k - 1, q.l - 2)?;
        return Ok(PartitionMinimum {
            value: (q.k * q.l) as u64,
            witness,
        });
    }
    feasible_pairs(q)
        .map(|p| PartitionMinimum {
            value: p.formula_size(),
            witness: p,
        })
        .reduce(|best, c| if c.value < best.value { c } else { best })
        .ok_or_else(|| Error::Internal(format!("no feasible spoke split for {q:?}")))
}

/// Grid search result: the minimum and one pair attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMinimum {
    pub value: u64,
    pub a: PointSet,
    pub b: PointSet,
}

/// Default cap on the number of `(A, B)` pairs the grid search will visit.
pub const GRID_PAIR_LIMIT: u128 = 50_000_000;

/// Exact minimum of `|A + B|` over `A, B ⊆ {0..=radius}^n` containing the
/// origin with `|A| = K`, `|B| = L` and `dim(A + B) = n`.
///
/// `None` means no pair on the grid reaches dimension `n`.
pub fn min_sumset_grid_exhaustive(
    k: usize,
    l: usize,
    n: usize,
    radius: i64,
) -> Result<Option<GridMinimum>> {
    min_sumset_grid_exhaustive_with_limit(k, l, n, radius, GRID_PAIR_LIMIT)
}

pub fn min_sumset_grid_exhaustive_with_limit(
    k: usize,
    l: usize,
    n: usize,
    radius: i64,
    pair_limit: u128,
) -> Result<Option<GridMinimum>> {
    if k < 1 || l < 1 || radius < 0 {
        return Err(invalid!("need K, L >= 1 and radius >= 0"));
    }
    let grid: Vec<Point> = grid_points(n, radius);
    let origin = vec![0i64; n];
    let others: Vec<&Point> = grid.iter().filter(|p| **p != origin).collect();
    let pairs = binomial(others.len() as u128, k as u128 - 1)
        .saturating_mul(binomial(others.len() as u128, l as u128 - 1));
    if pairs > pair_limit {
        return Err(Error::BudgetExhausted {
            spent: pairs.min(u64::MAX as u128) as u64,
        });
    }
    let a_choices = subsets(others.len(), k - 1);
    let b_choices = subsets(others.len(), l - 1);
    let to_set = |idx: &[usize]| -> PointSet {
        let pts = std::iter::once(origin.clone()).chain(idx.iter().map(|&i| others[i].clone()));
        PointSet::new(n, pts).expect("distinct grid points")
    };
    let best = a_choices
        .par_iter()
        .enumerate()
        .filter_map(|(ai, a_idx)| {
            let a = to_set(a_idx);
            let mut local: Option<(u64, usize, usize)> = None;
            for (bi, b_idx) in b_choices.iter().enumerate() {
                let b = to_set(b_idx);
                let sum = minkowski_sum(&a, &b).expect("same dimension");
                let size = sum.len() as u64;
                if local.is_some_and(|(v, _, _)| v <= size) {
                    continue;
                }
                if affine_dim(&sum).expect("non-empty") == n {
                    local = Some((size, ai, bi));
                }
            }
            local
        })
        // Deterministic tie-break: smallest value, then first A, then first B.
        .min();
    Ok(best.map(|(value, ai, bi)| GridMinimum {
        value,
        a: to_set(&a_choices[ai]),
        b: to_set(&b_choices[bi]),
    }))
}

fn grid_points(n: usize, radius: i64) -> Vec<Point> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Point| {
                (0..=radius).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// All `r`-subsets of `0..m` in lexicographic order.
fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(m: usize, r: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in from..m {
            if m - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(m, r, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, r, 0, &mut cur, &mut out);
    out
}

pub(crate) fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r)
        .try_fold(1u128, |acc, i| acc.checked_mul(n - i).map(|v| v / (i + 1)))
        .unwrap_or(u128::MAX)
}
