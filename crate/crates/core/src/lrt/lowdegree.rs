//! Low-degree signed-star statistic.
//!
//! `S_D = Σ_{j=2}^{D} [Σ_i (d_i)_j − n E0(d)_j] / sd_j`, where `(d)_j` is the
//! falling factorial (the number of `j`-stars at a vertex times `j!`),
//! `E0(d)_j = (n−1)_j (m)_j / (N)_j` is the exact null factorial moment and
//! `sd_j` is the null standard deviation of `Σ_i (d_i)_j`, estimated once per
//! `(n, m, D)` by Monte Carlo. The `j = 1` term is identically zero
//! (handshake) and is omitted. Everything is carried in log scale because
//! `(d)_j` overflows quickly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::{histogram, ln_falling};
use crate::error::{invalid, Error, Result};
use crate::graphmodels::{sample_null_degrees, DegreeVector, ModelParams};
use crate::special::StreamingLse;
use crate::streams;

pub const DEFAULT_CALIBRATION_REPLICATES: usize = 10_000;

/// Null calibration for one `(n, m, D)`.
#[derive(Clone, Debug)]
pub struct LowDegreeCalibration {
    n: u64,
    m: u64,
    d_max: usize,
    /// `ln sd_j` at index `j` (entries 0 and 1 unused).
    log_sd: Vec<f64>,
    /// `ln(n E0(d)_j)` at index `j`.
    log_null_mean: Vec<f64>,
    /// `S_D` over the calibration replicates, ascending.
    null_stats: Vec<f64>,
}

impl LowDegreeCalibration {
    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn replicates(&self) -> usize {
        self.null_stats.len()
    }

    /// Empirical null `q`-quantile of `S_D`, usable as a level-`(1−q)` threshold.
    pub fn null_quantile(&self, q: f64) -> f64 {
        crate::harness::quantile_sorted(&self.null_stats, q)
    }

    fn statistic(&self, log_sums: &[f64]) -> f64 {
        (2..=self.d_max)
            .filter(|&j| self.log_sd[j].is_finite())
            .map(|j| (log_sums[j] - self.log_sd[j]).exp() - (self.log_null_mean[j] - self.log_sd[j]).exp())
            .sum()
    }
}

/// `ln Σ_i (d_i)_j` for `j = 0..=d_max`.
fn log_falling_sums(deg: &[u32], d_max: usize) -> Vec<f64> {
    let hist = histogram(deg);
    (0..=d_max)
        .map(|j| {
            let mut acc = StreamingLse::new();
            for &(d, c) in &hist {
                acc.push(f64::from(c).ln() + ln_falling(u64::from(d), j as u64));
            }
            acc.value()
        })
        .collect()
}

fn log_null_means(n: u64, m: u64, d_max: usize) -> Vec<f64> {
    let big_n = n * (n - 1) / 2;
    (0..=d_max)
        .map(|j| {
            let j = j as u64;
            (n as f64).ln() + ln_falling(n - 1, j) + ln_falling(m, j) - ln_falling(big_n, j)
        })
        .collect()
}

type CalibrationCell = Arc<OnceLock<Arc<LowDegreeCalibration>>>;

/// Write-once cache of calibrations keyed by `(n, m, D)`.
pub struct LowDegreeCalibrator {
    replicates: usize,
    seed: u64,
    cache: Mutex<HashMap<(u64, u64, usize), CalibrationCell>>,
}

impl LowDegreeCalibrator {
    pub fn new(replicates: usize, seed: u64) -> Self {
        assert!(replicates >= 2, "calibration needs at least two replicates");
        Self {
            replicates,
            seed,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn calibration(&self, params: &ModelParams, d_max: usize) -> Result<Arc<LowDegreeCalibration>> {
        check_d(params, d_max)?;
        let key = (params.n(), params.m(), d_max);
        let cell = {
            let mut map = self.cache.lock().expect("calibration cache poisoned");
            Arc::clone(map.entry(key).or_default())
        };
        Ok(Arc::clone(cell.get_or_init(|| Arc::new(self.calibrate(params, d_max)))))
    }

    fn calibrate(&self, params: &ModelParams, d_max: usize) -> LowDegreeCalibration {
        let (n, m) = (params.n(), params.m());
        let point = n.wrapping_mul(0x1_0000_0001).wrapping_add(m).rotate_left(7) ^ d_max as u64;
        let sums: Vec<Vec<f64>> = (0..self.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = streams::stream(self.seed, "low-degree-calibration", point, r);
                let deg = sample_null_degrees(params, &mut rng);
                log_falling_sums(deg.as_slice(), d_max)
            })
            .collect();
        let log_null_mean = log_null_means(n, m, d_max);
        let mut log_sd = vec![f64::NEG_INFINITY; d_max + 1];
        for (j, slot) in log_sd.iter_mut().enumerate().skip(2) {
            let top = sums.iter().map(|s| s[j]).fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                continue;
            }
            let scaled: Vec<f64> = sums.iter().map(|s| (s[j] - top).exp()).collect();
            let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
            let var = scaled.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (scaled.len() - 1) as f64;
            if var > 0.0 {
                *slot = top + 0.5 * var.ln();
            }
        }
        let mut cal = LowDegreeCalibration {
            n,
            m,
            d_max,
            log_sd,
            log_null_mean,
            null_stats: Vec::new(),
        };
        let mut stats: Vec<f64> = sums.iter().map(|s| cal.statistic(s)).collect();
        stats.sort_by(f64::total_cmp);
        cal.null_stats = stats;
        cal
    }
}

fn check_d(params: &ModelParams, d_max: usize) -> Result<()> {
    if d_max < 1 || d_max as u64 > params.n() - 1 {
        return Err(invalid(format!("D must lie in [1, n-1], got {d_max}")));
    }
    Ok(())
}

/// `S_D` for one degree vector under a matching calibration.
pub fn low_degree_stat(
    deg: &DegreeVector,
    params: &ModelParams,
    d_max: usize,
    calibrator: &LowDegreeCalibrator,
) -> Result<f64> {
    deg.check_against(params)?;
    check_d(params, d_max)?;
    if d_max == 1 {
        return Ok(0.0);
    }
    let cal = calibrator.calibration(params, d_max)?;
    if cal.n != params.n() || cal.m != params.m() {
        return Err(Error::Inconsistent("calibration does not match params".into()));
    }
    Ok(cal.statistic(&log_falling_sums(deg.as_slice(), d_max)))
}
