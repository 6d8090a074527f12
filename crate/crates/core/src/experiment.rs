//! Density sweeps and the corollary weight report.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{default_density, weight_threshold, BernoulliStream};
use crate::error::{invalid, Result};
use crate::freeness::{verify_support, SearchLimits, Verdict};
use crate::rho::{rho_closed, to_f64, Rational, RhoValue};

pub const SWEEP_FORMAT_VERSION: &str = "sweep-csv/1";

pub const SWEEP_COLUMNS: [&str; 10] = [
    "N",
    "k",
    "l",
    "scale",
    "p",
    "samples",
    "free_frac",
    "mean_gamma",
    "mean_trials",
    "seed",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n_values: Vec<u64>,
    pub k: usize,
    pub l: usize,
    pub scales: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    /// Per-sample verifier budget; defaults to the library default.
    #[serde(default)]
    pub max_ops: Option<u64>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.k > self.l {
            return Err(invalid!(
                "need 2 <= k <= l (got k={}, l={})",
                self.k,
                self.l
            ));
        }
        if self.n_values.is_empty() || self.scales.is_empty() {
            return Err(invalid!("n_values and scales must be non-empty"));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(invalid!("N must be >= 2 (got {n})"));
        }
        if let Some(s) = self.scales.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(invalid!("scales must be finite and >= 0 (got {s})"));
        }
        if self.samples == 0 {
            return Err(invalid!("samples must be positive"));
        }
        Ok(())
    }
}

/// One `(N, scale)` cell.
///
/// A sample is accepted under the construction's rule: rectangle-free, and
/// at or above the weight threshold when that threshold is positive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub k: usize,
    pub l: usize,
    pub scale: f64,
    pub p: f64,
    pub samples: u64,
    pub free: u64,
    pub accepted: u64,
    /// Samples whose verification ran out of budget; counted as not free.
    pub exhausted: u64,
    pub free_frac: f64,
    /// Mean γ over accepted samples, NaN when none were accepted.
    pub mean_gamma: f64,
    /// `samples / accepted`, the expected Las Vegas trial count.
    pub mean_trials: f64,
    pub seed: u64,
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "N")]
    n: u64,
    k: usize,
    l: usize,
    scale: f64,
    p: f64,
    samples: u64,
    free_frac: f64,
    mean_gamma: f64,
    mean_trials: f64,
    seed: u64,
}

impl From<&SweepRow> for CsvRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            n: r.n,
            k: r.k,
            l: r.l,
            scale: r.scale,
            p: r.p,
            samples: r.samples,
            free_frac: r.free_frac,
            mean_gamma: r.mean_gamma,
            mean_trials: r.mean_trials,
            seed: r.seed,
        }
    }
}

/// Key for all samples at one `N`. Every scale at that `N` reuses the same
/// uniforms, so supports are nested in the scale and the freeness frequency
/// is monotone in it without sampling noise.
fn cell_seed(seed: u64, n: u64) -> u64 {
    // splitmix64 finaliser over the pair.
    let mut z = seed ^ n.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

enum Sample {
    Rejected,
    Exhausted,
    Free { accepted: bool, gamma: u64 },
}

fn run_cell(spec: &SweepSpec, n: u64, scale: f64, limits: &SearchLimits) -> Result<SweepRow> {
    let p = (scale * default_density(spec.k, spec.l, n)?).clamp(0.0, 1.0);
    let threshold = weight_threshold(p, n);
    let key = cell_seed(spec.seed, n);
    let samples: Vec<Sample> = (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let support = BernoulliStream::new(key, i).sample(n, p);
            let gamma = support.len() as u64;
            Ok(match verify_support(&support, spec.k, spec.l, limits)? {
                Verdict::Block(_) => Sample::Rejected,
                Verdict::BudgetExhausted { .. } => Sample::Exhausted,
                Verdict::Free => Sample::Free {
                    accepted: threshold <= 0.0 || gamma as f64 >= threshold,
                    gamma,
                },
            })
        })
        .collect::<Result<_>>()?;

    let (mut free, mut accepted, mut exhausted, mut gamma_sum) = (0u64, 0u64, 0u64, 0u64);
    for s in &samples {
        match *s {
            Sample::Rejected => {}
            Sample::Exhausted => exhausted += 1,
            Sample::Free {
                accepted: ok,
                gamma,
            } => {
                free += 1;
                if ok {
                    accepted += 1;
                    gamma_sum += gamma;
                }
            }
        }
    }
    let total = spec.samples as f64;
    Ok(SweepRow {
        n,
        k: spec.k,
        l: spec.l,
        scale,
        p,
        samples: spec.samples,
        free,
        accepted,
        exhausted,
        free_frac: free as f64 / total,
        mean_gamma: if accepted == 0 {
            f64::NAN
        } else {
            gamma_sum as f64 / accepted as f64
        },
        mean_trials: if accepted == 0 {
            f64::INFINITY
        } else {
            total / accepted as f64
        },
        seed: spec.seed,
    })
}

/// All cells of the sweep, sorted by `(N, scale)`.
pub fn density_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let limits = SearchLimits {
        max_ops: spec.max_ops.unwrap_or(SearchLimits::default().max_ops),
        ..SearchLimits::default()
    };
    let cells: Vec<(u64, f64)> = spec
        .n_values
        .iter()
        .flat_map(|&n| spec.scales.iter().map(move |&s| (n, s)))
        .collect();
    let mut rows = cells
        .into_par_iter()
        .map(|(n, s)| run_cell(spec, n, s, &limits))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.n.cmp(&b.n).then(a.scale.total_cmp(&b.scale)));
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(SWEEP_COLUMNS)?;
    }
    for r in rows {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Magnitude {
    pub label: String,
    pub value: f64,
    pub note: &'static str,
}

pub const ASYMPTOTIC_NOTE: &str = "asymptotic, constant unspecified";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub n: u64,
    /// `k = l = ceil(log2 N)`.
    pub k: usize,
    pub l: usize,
    pub rho: RhoValue,
    /// `(k + l)/(k²l²)·N^{2−ρ}`.
    pub weight_bound: f64,
    /// `N²/log2^j N` for `j = 3..=6`.
    pub magnitudes: Vec<Magnitude>,
}

pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

pub fn weight_bound(k: usize, l: usize, rho: &Rational, n: u64) -> f64 {
    let coeff = (k + l) as f64 / (k * k * l * l) as f64;
    coeff * (n as f64).powf(2.0 - to_f64(rho))
}

pub fn corollary_report(n: u64) -> Result<CorollaryReport> {
    if n < 4 {
        return Err(invalid!("need N >= 4 (got {n})"));
    }
    let k = ceil_log2(n) as usize;
    let rho = rho_closed(k, k)?;
    let nf = n as f64;
    let lg = nf.log2();
    let magnitudes = (3..=6)
        .map(|j| Magnitude {
            label: format!("N^2/log^{j} N"),
            value: nf * nf / lg.powi(j),
            note: ASYMPTOTIC_NOTE,
        })
        .collect();
    Ok(CorollaryReport {
        n,
        k,
        l: k,
        weight_bound: weight_bound(k, k, &rho.value, n),
        rho,
        magnitudes,
    })
}
