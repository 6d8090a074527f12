//! The density exponent `ρ(K, L) = max_n (n + 2) / min|A + B|`, where the
//! minimum runs over `|A| = K`, `|B| = L` with `dim(A + B) = n` and
//! `1 ≤ n ≤ K + L − 2`.
//!
//! Everything here is exact: values are reduced fractions of `i128`.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::sumset::{min_sumset_size, SumsetBoundQuery};

pub type Rational = Ratio<i128>;

fn frac(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The closed-form term that attains the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoBranch {
    /// `K = 2`: `(L + 2) / (2L)`.
    KEqualsTwo,
    /// `(K + L) / (KL)`, from `n = K + L − 2`.
    FullDimension,
    /// `(K + L − 1) / (KL − 3)`, from `n = K + L − 3`.
    OneBelowFull,
    /// `2(L + 2) / (K(2L − K + 1))`, from `n = L`.
    AtL,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RhoValue {
    pub k: usize,
    pub l: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub value: Rational,
    /// Smallest `n` attaining the maximum.
    pub argmax_n: usize,
    /// Set by the closed form; `None` from the direct maximisation.
    pub branch: Option<RhoBranch>,
    /// The inputs arrived as `K > L` and were swapped.
    pub swapped: bool,
}

fn serialize_ratio<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

impl RhoValue {
    pub fn as_f64(&self) -> f64 {
        to_f64(&self.value)
    }
}

impl fmt::Display for RhoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.value.numer(), self.value.denom())
    }
}

fn normalize(k: usize, l: usize) -> Result<(usize, usize, bool)> {
    let (k, l, swapped) = if k > l { (l, k, true) } else { (k, l, false) };
    if k < 2 {
        return Err(invalid!("rho needs K, L >= 2 (got {k}, {l})"));
    }
    Ok((k, l, swapped))
}

/// `(n + 2) / min|A + B|` at a single dimension.
pub fn rho_at(k: usize, l: usize, n: usize) -> Result<Rational> {
    let q = SumsetBoundQuery::new(n, k, l)?;
    Ok(frac(n as i128 + 2, min_sumset_size(&q)? as i128))
}

/// Closed form: `(L+2)/(2L)` for `K = 2`, otherwise the largest of
/// `(K+L)/(KL)`, `(K+L−1)/(KL−3)` and `2(L+2)/(K(2L−K+1))`.
pub fn rho_closed(k: usize, l: usize) -> Result<RhoValue> {
    let (k, l, swapped) = normalize(k, l)?;
    let (ki, li) = (k as i128, l as i128);
    if k == 2 {
        return Ok(RhoValue {
            k,
            l,
            value: frac(li + 2, 2 * li),
            argmax_n: l,
            branch: Some(RhoBranch::KEqualsTwo),
            swapped,
        });
    }
    // Candidates listed by increasing n so ties resolve to the smallest n.
    let mut candidates = [
        (
            l,
            RhoBranch::AtL,
            frac(2 * (li + 2), ki * (2 * li - ki + 1)),
        ),
        (
            k + l - 3,
            RhoBranch::OneBelowFull,
            frac(ki + li - 1, ki * li - 3),
        ),
        (k + l - 2, RhoBranch::FullDimension, frac(ki + li, ki * li)),
    ];
    candidates.sort_by_key(|c| c.0);
    let best = candidates
        .iter()
        .fold(None::<&(usize, RhoBranch, Rational)>, |acc, c| match acc {
            Some(a) if a.2 >= c.2 => Some(a),
            _ => Some(c),
        })
        .expect("three candidates");
    Ok(RhoValue {
        k,
        l,
        value: best.2,
        argmax_n: best.0,
        branch: Some(best.1),
        swapped,
    })
}

/// Direct maximisation over `1 ≤ n ≤ K + L − 2` using the closed-form
/// minimum sumset sizes.
pub fn rho_by_max(k: usize, l: usize) -> Result<RhoValue> {
    let (k, l, swapped) = normalize(k, l)?;
    let mut best: Option<(usize, Rational)> = None;
    for n in 1..=k + l - 2 {
        let v = rho_at(k, l, n)?;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((n, v));
        }
    }
    let (argmax_n, value) = best.expect("K + L − 2 >= 2");
    Ok(RhoValue {
        k,
        l,
        value,
        argmax_n,
        branch: None,
        swapped,
    })
}

/// `(K + L + 2) / (KL)`.
pub fn rho_upper_bound(k: usize, l: usize) -> Rational {
    frac(k as i128 + l as i128 + 2, k as i128 * l as i128)
}

/// Whether `ρ(K, L) < (K + L + 2)/(KL)`; stated for `K ≥ 3`.
pub fn rho_upper_bound_check(k: usize, l: usize) -> Result<bool> {
    let (k, l, _) = normalize(k, l)?;
    if k < 3 {
        return Err(invalid!(
            "the strict upper bound is stated for K >= 3 (got K={k})"
        ));
    }
    Ok(rho_closed(k, l)?.value < rho_upper_bound(k, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(rho_closed(2, 2).unwrap().value, frac(1, 1));
        assert_eq!(rho_closed(3, 3).unwrap().value, frac(5, 6));
        assert_eq!(rho_closed(2, 4).unwrap().value, frac(3, 4));
        assert_eq!(rho_closed(3, 4).unwrap().value, frac(2, 3));
        for k in 3..30 {
            assert_eq!(
                rho_closed(k, k).unwrap().value,
                frac(2 * (k as i128 + 2), k as i128 * (k as i128 + 1))
            );
        }
    }

    #[test]
    fn by_max_examples() {
        // n = 1 and n = 2 tie at 3/3 and 4/4; the smallest n is reported.
        let r = rho_by_max(2, 2).unwrap();
        assert_eq!((r.value, r.argmax_n), (frac(1, 1), 1));
        assert_eq!(rho_at(2, 2, 2).unwrap(), frac(1, 1));
        for l in 3..20 {
            let r = rho_by_max(2, l).unwrap();
            assert_eq!(r.value, frac(l as i128 + 2, 2 * l as i128));
            assert_eq!(r.argmax_n, l);
        }
        assert_eq!(rho_by_max(3, 3).unwrap().value, frac(5, 6));
        assert_eq!(rho_by_max(3, 4).unwrap().value, frac(2, 3));
    }

    #[test]
    fn upper_bound_examples() {
        assert!(rho_upper_bound_check(3, 3).unwrap());
        assert!(rho_upper_bound_check(3, 10).unwrap());
        assert!(rho_upper_bound_check(10, 10).unwrap());
        // 12/55 < 11/50  <=>  600 < 605
        assert_eq!(rho_closed(10, 10).unwrap().value, frac(12, 55));
        assert!(rho_upper_bound_check(2, 5).is_err());
    }

    #[test]
    fn swapped_inputs_are_normalized() {
        let r = rho_closed(5, 3).unwrap();
        assert!(r.swapped);
        assert_eq!((r.k, r.l), (3, 5));
        assert_eq!(r.value, rho_closed(3, 5).unwrap().value);
        assert!(rho_closed(1, 4).is_err());
    }

    #[test]
    fn display_is_a_reduced_fraction() {
        assert_eq!(rho_closed(3, 3).unwrap().to_string(), "5/6");
        assert_eq!(rho_closed(2, 2).unwrap().to_string(), "1/1");
    }
}
