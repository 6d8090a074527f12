//! Rectangles `E = (a_1..a_k, b_1..b_l)` and their sum-coincidence classes.
//!
//! For a rectangle, `m(E)` counts distinct sums `a_i + b_j` and `n(E)` is the
//! dimension of the solution space of the system `S(E)` of all equations
//! `x_r + y_s = x_u + y_v` that `E` satisfies. Rectangles satisfying exactly
//! the same equations form a class, identified here by a [`SumPattern`].
//!
//! The checkers in this module enumerate every rectangle below a bound `N`
//! and confirm the three counting facts the union bound relies on:
//!
//! 1. a class has at most `N^{n}` members with coordinates below `N`;
//! 2. at most `C(k²l², k + l − n)` classes have `n(E) = n`;
//! 3. the images `A_E`, `B_E` of the unit vectors under the free-variable
//!    parametrisation satisfy `|A_E + B_E| = m(E)` and
//!    `dim(A_E + B_E) = n(E) − 2`, hence `n(E) ≤ ρ(k, l)·m(E)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::rho::{rho_closed, Rational};
use crate::sumset::{affine_dim, binomial, minkowski_sum, PointSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Rectangle {
    a: Vec<u64>,
    b: Vec<u64>,
}

impl Rectangle {
    pub fn new(a: Vec<u64>, b: Vec<u64>) -> Result<Self> {
        let distinct = |v: &[u64]| v.iter().collect::<BTreeSet<_>>().len() == v.len();
        if a.is_empty() || b.is_empty() {
            return Err(invalid!("rectangle blocks must be non-empty"));
        }
        if !distinct(&a) || !distinct(&b) {
            return Err(invalid!(
                "rectangle coordinates must be distinct within each block"
            ));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn l(&self) -> usize {
        self.b.len()
    }

    fn sums(&self) -> impl Iterator<Item = u64> + '_ {
        self.a
            .iter()
            .flat_map(|&x| self.b.iter().map(move |&y| x + y))
    }
}

/// Labels for the `k × l` cells, row-major; two cells share a label iff
/// their sums coincide. Labels start at 0 and are assigned in order of first
/// appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SumPattern {
    pub k: usize,
    pub l: usize,
    pub labels: Vec<u16>,
}

impl SumPattern {
    pub fn label_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Cells grouped by label, each group in row-major order.
    fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.label_count()];
        for (cell, &lab) in self.labels.iter().enumerate() {
            groups[lab as usize].push(cell);
        }
        groups
    }

    /// Rows of `S(E)` over the variables `x_1..x_k, y_1..y_l`. Each label
    /// group contributes the equations tying its first cell to the others,
    /// which span all of the group's equations.
    pub fn equations(&self) -> Vec<Vec<i128>> {
        let width = self.k + self.l;
        let mut rows = Vec::new();
        for group in self.groups() {
            let (first, rest) = group.split_first().expect("groups are non-empty");
            let (r, s) = (first / self.l, first % self.l);
            for &cell in rest {
                let (u, v) = (cell / self.l, cell % self.l);
                let mut row = vec![0i128; width];
                row[r] += 1;
                row[self.k + s] += 1;
                row[u] -= 1;
                row[self.k + v] -= 1;
                rows.push(row);
            }
        }
        rows
    }
}

pub fn sum_pattern(e: &Rectangle) -> SumPattern {
    let mut seen: HashMap<u64, u16> = HashMap::new();
    let labels = e
        .sums()
        .map(|s| {
            let next = seen.len() as u16;
            *seen.entry(s).or_insert(next)
        })
        .collect();
    SumPattern {
        k: e.k(),
        l: e.l(),
        labels,
    }
}

/// `m(E)`: number of distinct sums.
pub fn points_count(e: &Rectangle) -> usize {
    e.sums().collect::<BTreeSet<_>>().len()
}

/// `n(E) = (k + l) − rank S(E)`.
pub fn solution_dim(e: &Rectangle) -> usize {
    pattern_solution_dim(&sum_pattern(e))
}

fn pattern_solution_dim(p: &SumPattern) -> usize {
    p.k + p.l - linalg::rank(&p.equations())
}

/// `m(E)`, `n(E)` and the images `A_E`, `B_E ⊂ Z^{n−2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectangleAnalysis {
    pub m: usize,
    pub n: usize,
    pub a_img: PointSet,
    pub b_img: PointSet,
}

/// Column scan order used when choosing free variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ColumnOrder {
    #[default]
    Natural,
    Reversed,
}

pub fn psi_images(e: &Rectangle) -> RectangleAnalysis {
    psi_images_with(e, ColumnOrder::Natural)
}

/// Solves `S(E) ∪ {x_1 = 0, y_1 = 0}`, writes every variable as an integer
/// combination of the `n − 2` free ones (denominators cleared by their lcm)
/// and maps unit vector `ξ_i` to the coefficient vector of variable `i`.
pub fn psi_images_with(e: &Rectangle, order: ColumnOrder) -> RectangleAnalysis {
    let pattern = sum_pattern(e);
    let (k, l) = (e.k(), e.l());
    let width = k + l;
    let mut rows = pattern.equations();
    let n = width - linalg::rank(&rows);
    for pinned in [0, k] {
        let mut row = vec![0i128; width];
        row[pinned] = 1;
        rows.push(row);
    }
    let columns: Vec<usize> = match order {
        ColumnOrder::Natural => (0..width).collect(),
        ColumnOrder::Reversed => (0..width).rev().collect(),
    };
    let ns = linalg::nullspace(&rows, width, &columns);
    let dim = ns.free.len();
    let image = |range: std::ops::Range<usize>| {
        PointSet::collect(
            dim,
            range.map(|i| ns.coeffs[i].iter().map(|&c| c as i64).collect()),
        )
        .expect("coefficient rows have the free-variable count as length")
    };
    RectangleAnalysis {
        m: pattern.label_count(),
        n,
        a_img: image(0..k),
        b_img: image(k..width),
    }
}

/// Refuse enumerations with more than this many coordinate tuples unless
/// overridden.
pub const DEFAULT_TUPLE_LIMIT: u128 = 100_000_000;

pub fn check_enumeration(n_grid: u64, k: usize, l: usize, limit: u128) -> Result<()> {
    if k < 2 || l < 2 {
        return Err(invalid!("need k, l >= 2 (got {k}, {l})"));
    }
    let tuples = (n_grid as u128)
        .checked_pow((k + l) as u32)
        .unwrap_or(u128::MAX);
    if tuples > limit {
        return Err(invalid!(
            "N^(k+l) = {n_grid}^{} exceeds the enumeration limit {limit}",
            k + l
        ));
    }
    Ok(())
}

/// Blocks of `r` distinct values below `n`: all orderings, or increasing
/// only when `increasing` is set. Lexicographic order.
fn blocks(n: u64, r: usize, increasing: bool) -> Vec<Vec<u64>> {
    fn rec(n: u64, r: usize, inc: bool, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        let start = if inc {
            cur.last().map_or(0, |&x| x + 1)
        } else {
            0
        };
        for v in start..n {
            if !inc && cur.contains(&v) {
                continue;
            }
            cur.push(v);
            rec(n, r, inc, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, r, increasing, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Every rectangle with coordinates in `[0, N)`.
///
/// With `normalized`, both blocks are increasing (one representative per
/// pair of sets); otherwise all ordered tuples are produced.
pub fn enumerate_rectangles(
    n_grid: u64,
    k: usize,
    l: usize,
    normalized: bool,
) -> impl Iterator<Item = Rectangle> {
    let a_blocks = blocks(n_grid, k, normalized);
    let b_blocks = blocks(n_grid, l, normalized);
    a_blocks.into_iter().flat_map(move |a| {
        b_blocks
            .clone()
            .into_iter()
            .map(move |b| Rectangle { a: a.clone(), b })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct LemmaSelection {
    pub lemma1: bool,
    pub lemma2: bool,
    pub lemma3: bool,
}

impl LemmaSelection {
    pub const ALL: Self = Self {
        lemma1: true,
        lemma2: true,
        lemma3: true,
    };
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassSummary {
    pub pattern: Vec<u16>,
    pub n: usize,
    pub m: usize,
    pub members: u64,
    /// `N^n`.
    pub bound: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub classes: usize,
    /// Largest `members / N^n` over all classes.
    pub worst_ratio: f64,
    pub worst_class: Option<ClassSummary>,
    pub violations: Vec<ClassSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma2Bucket {
    pub n: usize,
    pub classes: usize,
    /// `C(k²l², k + l − n)`.
    pub bound: u128,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub buckets: Vec<Lemma2Bucket>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RectangleViolation {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub check: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma3Report {
    pub checked: u64,
    /// Observed `|A_E|` and `|B_E|` values.
    pub a_sizes: BTreeSet<usize>,
    pub b_sizes: BTreeSet<usize>,
    /// Largest `n(E) / m(E)` seen, against `ρ(k, l)`.
    pub worst_n_over_m: String,
    pub rho: String,
    pub violations: Vec<RectangleViolation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub n_grid: u64,
    pub k: usize,
    pub l: usize,
    pub rectangles: u64,
    pub classes: usize,
    /// Number of rectangles for each observed `n(E)`.
    pub n_spectrum: BTreeMap<usize, u64>,
    /// Sanity checks every rectangle must pass regardless of which lemmas
    /// were requested: `k+l−1 ≤ m ≤ kl`, `3 ≤ n ≤ k+l`, `n = k+l` iff all
    /// sums are distinct, and one `n` per class.
    pub structural_violations: Vec<RectangleViolation>,
    pub lemma1: Option<Lemma1Report>,
    pub lemma2: Option<Lemma2Report>,
    pub lemma3: Option<Lemma3Report>,
}

impl LemmaReport {
    pub fn violation_count(&self) -> usize {
        self.structural_violations.len()
            + self.lemma1.as_ref().map_or(0, |r| r.violations.len())
            + self.lemma2.as_ref().map_or(0, |r| r.violations)
            + self.lemma3.as_ref().map_or(0, |r| r.violations.len())
    }
}

#[derive(Default)]
struct Partial {
    rectangles: u64,
    classes: HashMap<SumPattern, ClassAcc>,
    violations: Vec<RectangleViolation>,
    l3: L3Acc,
}

struct ClassAcc {
    n: usize,
    m: usize,
    members: u64,
}

#[derive(Default)]
struct L3Acc {
    checked: u64,
    a_sizes: BTreeSet<usize>,
    b_sizes: BTreeSet<usize>,
    worst: Option<Rational>,
    violations: Vec<RectangleViolation>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.rectangles += other.rectangles;
        for (p, c) in other.classes {
            match self.classes.get_mut(&p) {
                Some(acc) => {
                    if acc.n != c.n {
                        self.violations.push(RectangleViolation {
                            a: vec![],
                            b: vec![],
                            check: format!(
                                "class {:?} has n = {} and n = {}",
                                p.labels, acc.n, c.n
                            ),
                        });
                    }
                    acc.members += c.members;
                }
                None => {
                    self.classes.insert(p, c);
                }
            }
        }
        self.violations.extend(other.violations);
        self.l3.checked += other.l3.checked;
        self.l3.a_sizes.extend(other.l3.a_sizes);
        self.l3.b_sizes.extend(other.l3.b_sizes);
        self.l3.worst = match (self.l3.worst, other.l3.worst) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        self.l3.violations.extend(other.l3.violations);
        self
    }
}

pub fn verify_lemma1(n_grid: u64, k: usize, l: usize) -> Result<LemmaReport> {
    verify_lemmas(
        n_grid,
        k,
        l,
        LemmaSelection {
            lemma1: true,
            ..Default::default()
        },
        DEFAULT_TUPLE_LIMIT,
    )
}

pub fn verify_lemma2(n_grid: u64, k: usize, l: usize) -> Result<LemmaReport> {
    verify_lemmas(
        n_grid,
        k,
        l,
        LemmaSelection {
            lemma2: true,
            ..Default::default()
        },
        DEFAULT_TUPLE_LIMIT,
    )
}

pub fn verify_lemma3(n_grid: u64, k: usize, l: usize) -> Result<LemmaReport> {
    verify_lemmas(
        n_grid,
        k,
        l,
        LemmaSelection {
            lemma3: true,
            ..Default::default()
        },
        DEFAULT_TUPLE_LIMIT,
    )
}

/// Enumerates all ordered rectangles in `[0, N)^{k+l}` and runs the selected
/// checks. Work is split by the `a` block; results are merged in a fixed
/// order so reports do not depend on scheduling.
pub fn verify_lemmas(
    n_grid: u64,
    k: usize,
    l: usize,
    which: LemmaSelection,
    tuple_limit: u128,
) -> Result<LemmaReport> {
    check_enumeration(n_grid, k, l, tuple_limit)?;
    let rho = rho_closed(k, l)?.value;
    let a_blocks = blocks(n_grid, k, false);
    let b_blocks = blocks(n_grid, l, false);

    let partials: Vec<Partial> = a_blocks
        .par_iter()
        .map(|a| {
            let mut part = Partial::default();
            for b in &b_blocks {
                let e = Rectangle {
                    a: a.clone(),
                    b: b.clone(),
                };
                analyze_one(&e, rho, which.lemma3, &mut part);
            }
            part
        })
        .collect();
    let merged = partials
        .into_iter()
        .fold(Partial::default(), Partial::merge);

    let mut classes: Vec<(SumPattern, ClassAcc)> = merged.classes.into_iter().collect();
    classes.sort_by(|x, y| x.0.cmp(&y.0));

    let mut n_spectrum = BTreeMap::new();
    for (_, c) in &classes {
        *n_spectrum.entry(c.n).or_insert(0) += c.members;
    }

    let lemma1 = which.lemma1.then(|| {
        let mut worst: Option<(f64, ClassSummary)> = None;
        let mut violations = Vec::new();
        for (p, c) in &classes {
            let bound = (n_grid as u128)
                .checked_pow(c.n as u32)
                .unwrap_or(u128::MAX);
            let summary = ClassSummary {
                pattern: p.labels.clone(),
                n: c.n,
                m: c.m,
                members: c.members,
                bound,
            };
            let ratio = c.members as f64 / bound as f64;
            if c.members as u128 > bound {
                violations.push(summary.clone());
            }
            if worst.as_ref().is_none_or(|(r, _)| ratio > *r) {
                worst = Some((ratio, summary));
            }
        }
        let (worst_ratio, worst_class) = match worst {
            Some((r, c)) => (r, Some(c)),
            None => (0.0, None),
        };
        Lemma1Report {
            classes: classes.len(),
            worst_ratio,
            worst_class,
            violations,
        }
    });

    let lemma2 = which.lemma2.then(|| {
        let mut per_n: BTreeMap<usize, usize> = BTreeMap::new();
        for (_, c) in &classes {
            *per_n.entry(c.n).or_default() += 1;
        }
        let equations = (k * k * l * l) as u128;
        let buckets: Vec<Lemma2Bucket> = per_n
            .into_iter()
            .map(|(n, count)| {
                let bound = binomial(equations, (k + l).saturating_sub(n) as u128);
                Lemma2Bucket {
                    n,
                    classes: count,
                    bound,
                    ok: count as u128 <= bound,
                }
            })
            .collect();
        let violations = buckets.iter().filter(|b| !b.ok).count();
        Lemma2Report {
            buckets,
            violations,
        }
    });

    let lemma3 = which.lemma3.then(|| {
        let l3 = &merged.l3;
        let worst = l3.worst.unwrap_or_default();
        Lemma3Report {
            checked: l3.checked,
            a_sizes: l3.a_sizes.clone(),
            b_sizes: l3.b_sizes.clone(),
            worst_n_over_m: format!("{}/{}", worst.numer(), worst.denom()),
            rho: format!("{}/{}", rho.numer(), rho.denom()),
            violations: l3.violations.clone(),
        }
    });

    Ok(LemmaReport {
        n_grid,
        k,
        l,
        rectangles: merged.rectangles,
        classes: classes.len(),
        n_spectrum,
        structural_violations: merged.violations,
        lemma1,
        lemma2,
        lemma3,
    })
}

fn analyze_one(e: &Rectangle, rho: Rational, lemma3: bool, part: &mut Partial) {
    let (k, l) = (e.k(), e.l());
    let pattern = sum_pattern(e);
    let m = pattern.label_count();
    let n = pattern_solution_dim(&pattern);
    let flag = |part: &mut Partial, check: String| {
        part.violations.push(RectangleViolation {
            a: e.a.clone(),
            b: e.b.clone(),
            check,
        })
    };
    part.rectangles += 1;
    if m + 1 < k + l || m > k * l {
        flag(part, format!("m = {m} outside [k+l-1, kl]"));
    }
    if n < 3 || n > k + l {
        flag(part, format!("n = {n} outside [3, k+l]"));
    }
    if (n == k + l) != (m == k * l) {
        flag(
            part,
            format!("n = k+l iff all sums distinct fails (n = {n}, m = {m})"),
        );
    }
    match part.classes.get_mut(&pattern) {
        Some(acc) => {
            if acc.n != n {
                let prev = acc.n;
                flag(
                    part,
                    format!("class already seen with n = {prev}, here n = {n}"),
                );
            } else {
                acc.members += 1;
            }
        }
        None => {
            part.classes.insert(pattern, ClassAcc { n, m, members: 1 });
        }
    }

    if !lemma3 {
        return;
    }
    let l3 = &mut part.l3;
    l3.checked += 1;
    let mut bad = Vec::new();
    let an = psi_images(e);
    l3.a_sizes.insert(an.a_img.len());
    l3.b_sizes.insert(an.b_img.len());
    match minkowski_sum(&an.a_img, &an.b_img) {
        Ok(sum) => {
            if sum.len() != m {
                bad.push(format!("|A_E + B_E| = {} but m = {m}", sum.len()));
            }
            let dim = affine_dim(&sum).unwrap_or(usize::MAX);
            if dim + 2 != n {
                bad.push(format!(
                    "dim(A_E + B_E) = {dim} but n - 2 = {}",
                    n as i64 - 2
                ));
            }
        }
        Err(err) => bad.push(format!("image sets: {err}")),
    }
    let ratio = Rational::new(n as i128, m as i128);
    if ratio > rho {
        bad.push(format!("n = {n} > rho * m = {} * {m}", rho));
    }
    l3.worst = Some(l3.worst.map_or(ratio, |w| w.max(ratio)));
    for check in bad {
        l3.violations.push(RectangleViolation {
            a: e.a.clone(),
            b: e.b.clone(),
            check,
        });
    }
}

/// Fails with [`Error::Internal`] when a report carries violations.
pub fn ensure_clean(report: &LemmaReport) -> Result<()> {
    match report.violation_count() {
        0 => Ok(()),
        v => Err(Error::Internal(format!(
            "{v} violations for N={}, k={}, l={}",
            report.n_grid, report.k, report.l
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rect(a: &[u64], b: &[u64]) -> Rectangle {
        Rectangle::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn rejects_repeated_coordinates() {
        assert!(Rectangle::new(vec![0, 0], vec![0, 1]).is_err());
        assert!(Rectangle::new(vec![0, 1], vec![]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let one: Vec<_> = enumerate_rectangles(2, 2, 2, true).collect();
        assert_eq!(one, vec![rect(&[0, 1], &[0, 1])]);
        assert_eq!(enumerate_rectangles(3, 2, 2, true).count(), 9);
        assert_eq!(enumerate_rectangles(2, 3, 2, true).count(), 0);
        // Ordered: 3·2 choices per 2-block.
        assert_eq!(enumerate_rectangles(3, 2, 2, false).count(), 36);
    }

    #[test]
    fn point_counts_and_dimensions() {
        assert_eq!(points_count(&rect(&[0, 1], &[0, 1])), 3);
        assert_eq!(points_count(&rect(&[0, 1], &[0, 2])), 4);
        assert_eq!(points_count(&rect(&[0, 1, 2], &[0, 1, 2])), 5);
        assert_eq!(solution_dim(&rect(&[0, 1], &[0, 2])), 4);
        assert_eq!(solution_dim(&rect(&[0, 1], &[0, 1])), 3);
        assert_eq!(solution_dim(&rect(&[0, 1, 2], &[0, 1, 2])), 3);
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(
            sum_pattern(&rect(&[0, 1], &[0, 2])).labels,
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            sum_pattern(&rect(&[0, 1], &[0, 1])).labels,
            vec![0, 1, 1, 2]
        );
        assert_eq!(
            sum_pattern(&rect(&[0, 2], &[0, 1])).labels,
            vec![0, 1, 2, 3]
        );
        let p = sum_pattern(&rect(&[0, 1], &[0, 1]));
        assert_eq!(p.label_count(), 3);
        assert_eq!(p.equations(), vec![vec![1, -1, -1, 1]]);
    }

    #[test]
    fn psi_examples() {
        for (a, b, m, n, img) in [
            (&[0u64, 1][..], &[0u64, 2][..], 4, 4, 2),
            (&[0, 1], &[0, 1], 3, 3, 2),
            (&[0, 1, 2], &[0, 1, 2], 5, 3, 3),
        ] {
            let e = rect(a, b);
            let r = psi_images(&e);
            assert_eq!((r.m, r.n), (m, n));
            assert_eq!((r.a_img.len(), r.b_img.len()), (img, img));
            assert_eq!(r.a_img.ambient_dim(), n - 2);
            let sum = minkowski_sum(&r.a_img, &r.b_img).unwrap();
            assert_eq!(sum.len(), m);
            assert_eq!(affine_dim(&sum).unwrap(), n - 2);
        }
    }

    #[test]
    fn lemma_examples() {
        let r = verify_lemma1(2, 2, 2).unwrap();
        assert_eq!(r.violation_count(), 0);
        let r = verify_lemmas(4, 2, 2, LemmaSelection::ALL, DEFAULT_TUPLE_LIMIT).unwrap();
        assert_eq!(r.violation_count(), 0);
        let buckets = &r.lemma2.as_ref().unwrap().buckets;
        let four = buckets.iter().find(|b| b.n == 4).unwrap();
        assert_eq!((four.classes, four.bound), (1, 1));
        let three = buckets.iter().find(|b| b.n == 3).unwrap();
        assert!(three.classes <= 16 && three.bound == 16);
        assert_eq!(r.lemma3.as_ref().unwrap().rho, "1/1");
        for (n, k, l) in [(3, 2, 3), (6, 2, 2), (4, 3, 2), (8, 2, 2)] {
            let r = verify_lemmas(n, k, l, LemmaSelection::ALL, DEFAULT_TUPLE_LIMIT).unwrap();
            assert_eq!(r.violation_count(), 0, "N={n} k={k} l={l}");
            ensure_clean(&r).unwrap();
        }
    }

    #[test]
    fn enumeration_guard() {
        assert!(verify_lemma1(100, 3, 3).is_err());
        assert!(verify_lemma1(4, 1, 2).is_err());
    }

    fn small_rect() -> impl Strategy<Value = Rectangle> {
        (2usize..=3, 2usize..=3).prop_flat_map(|(k, l)| {
            (
                proptest::sample::subsequence((0u64..10).collect::<Vec<_>>(), k).prop_shuffle(),
                proptest::sample::subsequence((0u64..10).collect::<Vec<_>>(), l).prop_shuffle(),
            )
                .prop_map(|(a, b)| Rectangle::new(a, b).unwrap())
        })
    }

    proptest! {
        #[test]
        fn pattern_invariant_under_translation(e in small_rect(), c in 0u64..20) {
            let shifted_a = rect(&e.a().iter().map(|x| x + c).collect::<Vec<_>>(), e.b());
            let shifted_b = rect(e.a(), &e.b().iter().map(|x| x + c).collect::<Vec<_>>());
            prop_assert_eq!(sum_pattern(&shifted_a), sum_pattern(&e));
            prop_assert_eq!(sum_pattern(&shifted_b), sum_pattern(&e));
        }

        #[test]
        fn ranges_and_lemma3_hold(e in small_rect()) {
            let (k, l) = (e.k(), e.l());
            let m = points_count(&e);
            let n = solution_dim(&e);
            prop_assert!(k + l - 1 <= m && m <= k * l);
            prop_assert!(3 <= n && n <= k + l);
            prop_assert_eq!(n == k + l, m == k * l);
            prop_assert_eq!(sum_pattern(&e).label_count(), m);
            for order in [ColumnOrder::Natural, ColumnOrder::Reversed] {
                let r = psi_images_with(&e, order);
                let sum = minkowski_sum(&r.a_img, &r.b_img).unwrap();
                prop_assert_eq!(sum.len(), m);
                prop_assert_eq!(affine_dim(&sum).unwrap(), n - 2);
            }
            let rho = rho_closed(k, l).unwrap().value;
            prop_assert!(Rational::from_integer(n as i128) <= rho * Rational::from_integer(m as i128));
        }
    }
}
