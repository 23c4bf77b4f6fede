//! Test statistics and decisions: exact and REM-form likelihood ratios, the
//! max-degree threshold test, the low-degree signed-star statistic, and hub
//! estimation.

mod lowdegree;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphmodels::{DegreeVector, ModelParams};
use crate::hypergeom::degree_moments;
use crate::logspace::LogValue;
use crate::special::{ln_gamma, StreamingLse};

pub use lowdegree::{low_degree_stat, LowDegreeCalibration, LowDegreeCalibrator, DEFAULT_CALIBRATION_REPLICATES};

/// Auxiliary key names surfaced in [`TestOutcome::auxiliary`].
pub mod keys {
    pub const A_N: &str = "a_n";
    pub const MAX_DEGREE: &str = "max_degree";
    pub const LOG_LR: &str = "log_lr";
    pub const T_STAR: &str = "t_star";
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Null,
    Planted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub decision: Decision,
    pub statistic: f64,
    pub threshold: f64,
    pub auxiliary: BTreeMap<String, f64>,
}

impl TestOutcome {
    /// Decides planted iff `statistic >= threshold`.
    pub fn new(statistic: f64, threshold: f64) -> Self {
        let decision = if statistic >= threshold {
            Decision::Planted
        } else {
            Decision::Null
        };
        Self {
            decision,
            statistic,
            threshold,
            auxiliary: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, v: f64) -> Self {
        self.auxiliary.insert(key.to_owned(), v);
        self
    }

    pub fn is_planted(&self) -> bool {
        self.decision == Decision::Planted
    }
}

/// Degree histogram as `(degree, multiplicity)` pairs, ascending.
fn histogram(deg: &[u32]) -> Vec<(u32, u32)> {
    let max = deg.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u32; max + 1];
    for &d in deg {
        counts[d as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(d, c)| (d as u32, c))
        .collect()
}

/// ln of the falling factorial `(x)_j = x (x−1) ⋯ (x−j+1)`, `-inf` when `j > x`.
pub fn ln_falling(x: u64, j: u64) -> f64 {
    if j > x {
        return f64::NEG_INFINITY;
    }
    if j <= 16 {
        return (0..j).map(|t| ((x - t) as f64).ln()).sum();
    }
    ln_gamma((x + 1) as f64) - ln_gamma((x - j + 1) as f64)
}

/// `ln[(N)_k / ((m)_k n (n−1)_k)]`, the constant in front of the star count.
fn ln_lr_prefactor(params: &ModelParams) -> f64 {
    let (n, m, k) = (params.n(), params.m(), params.k());
    let big_n = params.pairs();
    let mut acc = -(n as f64).ln();
    for t in 0..k {
        acc += ((big_n - t) as f64 / (m - t) as f64).ln() - ((n - 1 - t) as f64).ln();
    }
    acc
}

// Float results within this distance of log Λ = 0 are settled exactly.
const TIE_BAND: f64 = 1e-8;

/// Exact log-likelihood ratio `log dP1/dP0` of a graph with the given degrees:
///
/// `Λ = C(N,m) / (n C(n−1,k) C(N−k,m−k)) · Σ_i C(d_i, k)`,
///
/// evaluated as `(N)_k / ((m)_k n (n−1)_k) · Σ_i (d_i)_k`. Values near
/// `Λ = 1` are recomputed in integer arithmetic so that exact ties are 0.
pub fn log_lr_exact(deg: &DegreeVector, params: &ModelParams) -> Result<LogValue<f64>> {
    deg.check_against(params)?;
    let k = params.k();
    let mut stars = StreamingLse::new();
    for (d, c) in histogram(deg.as_slice()) {
        if u64::from(d) >= k {
            stars.push(f64::from(c).ln() + ln_falling(u64::from(d), k));
        }
    }
    let log_stars = stars.value();
    if log_stars == f64::NEG_INFINITY {
        return Ok(LogValue::zero());
    }
    let value = ln_lr_prefactor(params) + log_stars;
    if value.abs() < TIE_BAND {
        return Ok(LogValue::from_ln(exact_near_one(deg.as_slice(), params)));
    }
    Ok(LogValue::from_ln(value))
}

fn falling_big(x: u64, j: u64) -> BigUint {
    if j > x {
        return BigUint::zero();
    }
    (0..j).fold(BigUint::from(1u8), |acc, t| acc * BigUint::from(x - t))
}

/// `ln Λ` for Λ within ~1e-8 of 1, from `(N)_k Σ(d_i)_k` against `n (n−1)_k (m)_k`.
fn exact_near_one(deg: &[u32], params: &ModelParams) -> f64 {
    let (n, m, k) = (params.n(), params.m(), params.k());
    let stars = histogram(deg)
        .into_iter()
        .fold(BigUint::zero(), |acc, (d, c)| acc + falling_big(u64::from(d), k) * BigUint::from(c));
    let num = BigInt::from(falling_big(params.pairs(), k) * stars);
    let den = BigInt::from(BigUint::from(n) * falling_big(n - 1, k) * falling_big(m, k));
    let diff = &num - &den;
    if diff.is_zero() {
        return 0.0;
    }
    let scaled = (diff << 160u32) / &den;
    let ratio = scaled.to_f64().unwrap_or(0.0) / 2f64.powi(160);
    let v = ratio.ln_1p();
    // Keep the exact sign even if rounding lands on zero.
    if v == 0.0 {
        if num > den {
            f64::MIN_POSITIVE
        } else {
            -f64::MIN_POSITIVE
        }
    } else {
        v
    }
}

/// REM-form approximation `log[e^{−a²/2} (1/n) Σ_i e^{a Y_i}]`, with
/// `a = kσ/μ` and `Y_i = (d_i − μ)/σ`. Returns the value and `a`.
pub fn log_lr_rem_form(deg: &DegreeVector, params: &ModelParams) -> Result<(LogValue<f64>, f64)> {
    deg.check_against(params)?;
    let (mu, sigma2) = degree_moments::<f64>(params.n(), params.m())?;
    if !(sigma2 > 0.0) {
        return Err(Error::Inconsistent("degree variance is zero".into()));
    }
    let sigma = sigma2.sqrt();
    let a = params.k() as f64 * sigma / mu;
    let mut acc = StreamingLse::new();
    for (d, c) in histogram(deg.as_slice()) {
        let y = (f64::from(d) - mu) / sigma;
        acc.push(f64::from(c).ln() + a * y);
    }
    let v = -a * a / 2.0 - (params.n() as f64).ln() + acc.value();
    Ok((LogValue::from_ln(v), a))
}

/// `t* = 2m/n + √((2m/n)(1 − m/N)) · √(2 ln n − (1/α) ln ln n)`.
pub fn max_degree_threshold(params: &ModelParams) -> Result<f64> {
    let n = params.n() as f64;
    let ln = n.ln();
    let inner = 2.0 * ln - ln.ln() / params.alpha();
    if !(inner > 0.0) {
        return Err(Error::BelowValidity(format!(
            "2 ln n - (1/alpha) ln ln n = {inner} is not positive for n = {}",
            params.n()
        )));
    }
    let mean = 2.0 * params.m() as f64 / n;
    let spread = (mean * (1.0 - params.m() as f64 / params.pairs() as f64)).max(0.0);
    Ok(mean + spread.sqrt() * inner.sqrt())
}

/// Planted iff the maximum degree reaches `t*`.
pub fn decide_max_degree(deg: &DegreeVector, params: &ModelParams) -> Result<TestOutcome> {
    deg.check_against(params)?;
    let t_star = max_degree_threshold(params)?;
    let max = f64::from(deg.max());
    Ok(TestOutcome::new(max, t_star)
        .with(keys::MAX_DEGREE, max)
        .with(keys::T_STAR, t_star))
}

/// Likelihood-ratio test: planted iff `log Λ >= 0`.
pub fn decide_lr(deg: &DegreeVector, params: &ModelParams) -> Result<TestOutcome> {
    let log_lr = log_lr_exact(deg, params)?.ln();
    Ok(TestOutcome::new(log_lr, 0.0)
        .with(keys::LOG_LR, log_lr)
        .with(keys::MAX_DEGREE, f64::from(deg.max())))
}

/// Smallest index attaining the maximum degree.
pub fn hub_estimate(deg: &[u32]) -> usize {
    let mut best = 0;
    for (i, &d) in deg.iter().enumerate() {
        if d > deg[best] {
            best = i;
        }
    }
    best
}
