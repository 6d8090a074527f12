//! Randomized construction of thin circulants.
//!
//! Each trial draws `γ_0..γ_{N−1}` i.i.d. Bernoulli(`p`) with the density
//! `p = scale · ((k + l)/(e·k²·l²))·N^{−ρ(k,l)}`, checks the support for an
//! integer-sum rectangle (equivalent to `(k, l)`-freeness of the padded
//! `2N × 2N` circulant) and, when `pN − 2√(pN) > 0`, that the support has at
//! least that many ones. The first accepted trial is returned; a run never
//! returns an unverified matrix.
//!
//! At the default density the union bound leaves freeness probability at
//! least `(4 − e)/4` and the weight threshold holds with probability at least
//! `3/4`, so a trial succeeds with probability at least
//! `(4 − e)/4 − 1/4 ≈ 0.07` without assuming independence of the two events.

use std::f64::consts::E;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::circulant::{CirculantMatrix, SupportSet};
use crate::error::{invalid, Error, Result};
use crate::freeness::{verify_support, SearchLimits, Verdict, Witness};
use crate::rho::{rho_closed, to_f64};

/// `((k + l)/(e·k²·l²))·N^{−ρ(k,l)}`, with `ρ` evaluated exactly.
pub fn default_density(k: usize, l: usize, n: u64) -> Result<f64> {
    if k < 2 || k > l {
        return Err(invalid!("need 2 <= k <= l (got k={k}, l={l})"));
    }
    if n < 2 {
        return Err(invalid!("need N >= 2 (got {n})"));
    }
    let rho = to_f64(&rho_closed(k, l)?.value);
    let (kf, lf) = (k as f64, l as f64);
    Ok((kf + lf) / (E * kf * kf * lf * lf) * (n as f64).powf(-rho))
}

/// `pN − 2√(pN)`; non-positive values make the weight test vacuous.
pub fn weight_threshold(p: f64, n: u64) -> f64 {
    let mean = p * n as f64;
    mean - 2.0 * mean.sqrt()
}

/// `e·Σ_{n=3}^{k+l} ((k + l)/(k²l²))^{n−1}`, the union-bound estimate of the
/// probability that a sampled support contains a rectangle.
pub fn failure_probability_bound(k: usize, l: usize) -> Result<f64> {
    if k < 2 || k > l {
        return Err(invalid!("need 2 <= k <= l (got k={k}, l={l})"));
    }
    let ratio = (k + l) as f64 / (k * k * l * l) as f64;
    Ok(E * (3..=k + l).map(|n| ratio.powi(n as i32 - 1)).sum::<f64>())
}

/// Indices per keyed block of the Bernoulli stream.
const BLOCK: u64 = 4096;

/// Independent Bernoulli draws from a counter-based generator.
///
/// Index `i` of trial `t` reads the 64-bit word at position `i mod BLOCK` of
/// block `i div BLOCK` in ChaCha8 stream `t` under key `seed`, so any block of
/// any trial can be regenerated on its own.
#[derive(Clone, Debug)]
pub struct BernoulliStream {
    seed: u64,
    trial: u64,
}

impl BernoulliStream {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self { seed, trial }
    }

    fn block_rng(&self, block: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.trial);
        // Word positions count 32-bit words; each draw consumes two.
        rng.set_word_pos(u128::from(block) * u128::from(BLOCK) * 2);
        rng
    }

    /// Support of `n` draws with success probability `p`.
    pub fn sample(&self, n: u64, p: f64) -> SupportSet {
        if p <= 0.0 || n == 0 {
            return SupportSet::empty(n);
        }
        if p >= 1.0 {
            return SupportSet::full(n);
        }
        // Include index i iff its uniform word falls below p·2^64.
        let cut = (p * 2f64.powi(64)) as u64;
        let mut members = Vec::new();
        for block in 0..n.div_ceil(BLOCK) {
            let mut rng = self.block_rng(block);
            let start = block * BLOCK;
            for i in start..(start + BLOCK).min(n) {
                if rng.next_u64() < cut {
                    members.push(i);
                }
            }
        }
        SupportSet::from_sorted_unchecked(n, members)
    }
}

/// One Bernoulli(`p`) support of size `n` (trial 0 of the stream for `seed`).
pub fn sample_support(n: u64, p: f64, seed: u64) -> Result<SupportSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid!("probability {p} outside [0, 1]"));
    }
    Ok(BernoulliStream::new(seed, 0).sample(n, p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionParams {
    /// The accepted matrix has order `2N`.
    pub n: u64,
    pub k: usize,
    pub l: usize,
    /// Multiplier on the default density; the product is clamped to `[0, 1]`.
    pub density_scale: f64,
    pub max_trials: u64,
    pub seed: u64,
    /// Shifted-intersection budget per trial.
    pub max_ops: u64,
    /// Trials evaluated concurrently; `1` runs strictly in order.
    #[serde(skip)]
    pub jobs: usize,
}

impl ConstructionParams {
    pub fn new(n: u64, k: usize, l: usize) -> Self {
        Self {
            n,
            k,
            l,
            density_scale: 1.0,
            max_trials: 100,
            seed: 0,
            max_ops: SearchLimits::default().max_ops,
            jobs: 1,
        }
    }

    pub fn density(&self) -> Result<f64> {
        if !self.density_scale.is_finite() || self.density_scale < 0.0 {
            return Err(invalid!("density scale must be finite and >= 0"));
        }
        Ok((self.density_scale * default_density(self.k, self.l, self.n)?).clamp(0.0, 1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptedOn {
    FreenessAndWeight,
    /// The weight threshold was non-positive, so only freeness was tested.
    FreenessOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    Rectangle { witness: Witness },
    LowWeight { gamma: u64, threshold: f64 },
    BudgetExhausted { spent: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub gamma: u64,
    #[serde(flatten)]
    pub reason: RejectReason,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionResult {
    pub params: ConstructionParams,
    pub p: f64,
    /// Order `2N`, first row `γ` padded with `N` zeros.
    pub matrix: CirculantMatrix,
    pub trials_used: u64,
    /// `γ`, ones in the first row.
    pub row_weight: u64,
    pub threshold: f64,
    pub accepted_on: AcceptedOn,
    pub rejected: Vec<TrialRecord>,
}

impl ConstructionResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "params": self.params,
            "p": self.p,
            "trials_used": self.trials_used,
            "gamma": self.row_weight,
            "weight": self.matrix.weight().weight,
            "threshold": self.threshold,
            "accepted_on": self.accepted_on,
            "rejected": self.rejected,
            "matrix": self.matrix.to_json_value(false),
        })
    }
}

/// Every trial was rejected.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionFailure {
    pub params: ConstructionParams,
    pub p: f64,
    pub threshold: f64,
    pub rejected: Vec<TrialRecord>,
}

impl ConstructionFailure {
    pub fn budget_only(&self) -> bool {
        self.rejected
            .iter()
            .all(|t| matches!(t.reason, RejectReason::BudgetExhausted { .. }))
    }
}

enum TrialOutcome {
    Accepted(SupportSet, AcceptedOn),
    Rejected(TrialRecord),
}

fn run_trial(
    params: &ConstructionParams,
    p: f64,
    threshold: f64,
    trial: u64,
) -> Result<TrialOutcome> {
    let support = BernoulliStream::new(params.seed, trial).sample(params.n, p);
    let gamma = support.len() as u64;
    let limits = SearchLimits {
        max_ops: params.max_ops,
        ..SearchLimits::default()
    };
    let reason = match verify_support(&support, params.k, params.l, &limits)? {
        Verdict::Block(witness) => RejectReason::Rectangle { witness },
        Verdict::BudgetExhausted { spent } => RejectReason::BudgetExhausted { spent },
        Verdict::Free if threshold > 0.0 && (gamma as f64) < threshold => {
            RejectReason::LowWeight { gamma, threshold }
        }
        Verdict::Free => {
            let on = if threshold > 0.0 {
                AcceptedOn::FreenessAndWeight
            } else {
                AcceptedOn::FreenessOnly
            };
            return Ok(TrialOutcome::Accepted(support, on));
        }
    };
    Ok(TrialOutcome::Rejected(TrialRecord {
        trial,
        gamma,
        reason,
    }))
}

/// Las Vegas loop: sample, verify, accept the first good trial.
///
/// With `jobs > 1` trials run in batches; the lowest accepted trial index
/// wins, so the result matches the sequential run exactly.
pub fn construct_thin_circulant(params: &ConstructionParams) -> Result<ConstructionResult> {
    if params.max_trials == 0 {
        return Err(invalid!("max_trials must be positive"));
    }
    let p = params.density()?;
    let threshold = weight_threshold(p, params.n);
    let batch = params.jobs.max(1) as u64;
    let mut rejected = Vec::new();
    let mut start = 0;
    while start < params.max_trials {
        let end = (start + batch).min(params.max_trials);
        let outcomes: Vec<Result<TrialOutcome>> = if batch == 1 {
            vec![run_trial(params, p, threshold, start)]
        } else {
            (start..end)
                .into_par_iter()
                .map(|t| run_trial(params, p, threshold, t))
                .collect()
        };
        for (trial, outcome) in (start..end).zip(outcomes) {
            match outcome? {
                TrialOutcome::Rejected(rec) => rejected.push(rec),
                TrialOutcome::Accepted(support, accepted_on) => {
                    let row_weight = support.len() as u64;
                    return Ok(ConstructionResult {
                        params: params.clone(),
                        p,
                        matrix: CirculantMatrix::embed_double(&support)?,
                        trials_used: trial + 1,
                        row_weight,
                        threshold,
                        accepted_on,
                        rejected,
                    });
                }
            }
        }
        start = end;
    }
    Err(Error::ConstructionFailed(Box::new(ConstructionFailure {
        params: params.clone(),
        p,
        threshold,
        rejected,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freeness::find_rectangle_integer;

    #[test]
    fn density_examples() {
        let p = default_density(2, 2, 1024).unwrap();
        assert!((p - 1.0 / (4.0 * E * 1024.0)).abs() < 1e-15);
        assert!((p - 8.98e-5).abs() < 5e-8);
        let p = default_density(3, 3, 4096).unwrap();
        assert!((p - 6.0 / (81.0 * E) * 4096f64.powf(-5.0 / 6.0)).abs() < 1e-15);
        assert!((p - 2.66e-5).abs() < 5e-8);
        assert!(default_density(3, 2, 100).is_err());
        assert!(default_density(2, 2, 1).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert!((weight_threshold(0.01, 100_000) - (1000.0 - 2.0 * 1000f64.sqrt())).abs() < 1e-9);
        assert!((weight_threshold(0.01, 100_000) - 936.75).abs() < 0.01);
        assert_eq!(weight_threshold(0.5, 8), 0.0);
        assert!(weight_threshold(0.1, 20) < 0.0);
    }

    #[test]
    fn failure_bound_examples() {
        let b = failure_probability_bound(2, 2).unwrap();
        assert!((b - 5.0 * E / 64.0).abs() < 1e-12);
        let b = failure_probability_bound(3, 3).unwrap();
        let r: f64 = 6.0 / 81.0;
        assert!((b - E * (r.powi(2) + r.powi(3) + r.powi(4) + r.powi(5))).abs() < 1e-15);
        assert!((b - 0.0161).abs() < 1e-4);
    }

    #[test]
    fn sampling_extremes_and_determinism() {
        assert!(sample_support(50, 0.0, 1).unwrap().is_empty());
        assert_eq!(sample_support(50, 1.0, 1).unwrap().len(), 50);
        assert!(sample_support(50, 1.5, 1).is_err());
        let a = BernoulliStream::new(7, 3).sample(10_000, 0.2);
        let b = BernoulliStream::new(7, 3).sample(10_000, 0.2);
        let c = BernoulliStream::new(7, 4).sample(10_000, 0.2);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sampling_concentrates() {
        let (n, p) = (100_000u64, 0.01);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for seed in 0..5 {
            let got = sample_support(n, p, seed).unwrap().len() as f64;
            assert!((got - 1000.0).abs() <= 10.0 * sigma, "seed {seed}: {got}");
        }
    }

    #[test]
    fn supports_are_nested_in_p() {
        let s = BernoulliStream::new(11, 0);
        let lo = s.sample(5000, 0.1);
        let hi = s.sample(5000, 0.3);
        assert!(lo.is_subset(&hi));
    }

    #[test]
    fn zero_scale_accepts_empty_matrix() {
        let mut params = ConstructionParams::new(64, 2, 2);
        params.density_scale = 0.0;
        let r = construct_thin_circulant(&params).unwrap();
        assert_eq!((r.trials_used, r.row_weight), (1, 0));
        assert_eq!(r.accepted_on, AcceptedOn::FreenessOnly);
        assert_eq!(r.matrix.n(), 128);
    }

    #[test]
    fn dense_single_trial_fails_with_witness() {
        let mut params = ConstructionParams::new(64, 2, 2);
        params.density_scale = 0.5 / default_density(2, 2, 64).unwrap();
        params.max_trials = 1;
        match construct_thin_circulant(&params) {
            Err(Error::ConstructionFailed(f)) => {
                assert_eq!(f.rejected.len(), 1);
                assert!((f.p - 0.5).abs() < 1e-12);
                assert!(matches!(
                    f.rejected[0].reason,
                    RejectReason::Rectangle { .. }
                ));
                assert!(!f.budget_only());
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn parallel_batches_match_sequential() {
        let mut params = ConstructionParams::new(200, 2, 2);
        params.density_scale = 0.06 / default_density(2, 2, 200).unwrap();
        params.max_trials = 400;
        params.seed = 5;
        let seq = construct_thin_circulant(&params).unwrap();
        params.jobs = 8;
        let par = construct_thin_circulant(&params).unwrap();
        assert_eq!(seq.matrix, par.matrix);
        assert_eq!(seq.trials_used, par.trials_used);
        assert_eq!(seq.rejected, par.rejected);
        assert!(seq.trials_used > 1, "density chosen so early trials fail");
        let support = SupportSet::new(200, seq.matrix.row().members().iter().copied()).unwrap();
        assert!(find_rectangle_integer(&support, 2, 2).unwrap().is_none());
    }
}
