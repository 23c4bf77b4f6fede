//! Hypergeometric and binomial kernels.
//!
//! `Hypergeom(N, K, n)` counts successes in a sample of size `n` drawn
//! without replacement from a population of `N` items, `K` of which are
//! successes. Vertex degrees in G(n, m) are `Hypergeom(N, n-1, m)`.

mod cumulants;
mod pgf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::logspace::LogValue;
use crate::special::{from_u64, lit, ln_binomial_pmf, normal_sf, Real};

pub use cumulants::{exact_cumulants, fubini_sum, stirling2, stirling_cumulant_bound, MAX_CUMULANT_SUPPORT};
pub use pgf::{pgf_real_rooted, MAX_PGF_SUPPORT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HypergeomParams {
    population: u64,
    successes: u64,
    draws: u64,
}

impl HypergeomParams {
    pub fn new(population: u64, successes: u64, draws: u64) -> Result<Self> {
        if population == 0 {
            return Err(invalid("hypergeometric population must be positive"));
        }
        if successes > population {
            return Err(invalid(format!(
                "successes {successes} exceed population {population}"
            )));
        }
        if draws > population {
            return Err(invalid(format!("draws {draws} exceed population {population}")));
        }
        Ok(Self {
            population,
            successes,
            draws,
        })
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Inclusive support `[lo, hi]`.
    pub fn support(&self) -> (u64, u64) {
        let failures = self.population - self.successes;
        (
            self.draws.saturating_sub(failures),
            self.successes.min(self.draws),
        )
    }

    pub fn support_len(&self) -> u64 {
        let (lo, hi) = self.support();
        hi - lo + 1
    }

    pub fn mode(&self) -> u64 {
        let (lo, hi) = self.support();
        let raw = (u128::from(self.draws) + 1) * (u128::from(self.successes) + 1)
            / (u128::from(self.population) + 2);
        (raw as u64).clamp(lo, hi)
    }

    pub fn mean<T: Real>(&self) -> T {
        from_u64::<T>(self.draws) * from_u64::<T>(self.successes) / from_u64::<T>(self.population)
    }

    /// Exact variance `n (K/N) ((N-K)/N) ((N-n)/(N-1))`.
    pub fn variance<T: Real>(&self) -> T {
        if self.population <= 1 {
            return T::zero();
        }
        let big_n = from_u64::<T>(self.population);
        let k = from_u64::<T>(self.successes);
        let n = from_u64::<T>(self.draws);
        n * (k / big_n) * ((big_n - k) / big_n) * ((big_n - n) / (big_n - T::one()))
    }

    /// `P(X = x + 1) / P(X = x)` for `x` and `x + 1` inside the support.
    #[inline]
    fn ratio_up(&self, x: u64) -> f64 {
        let k = self.successes as f64;
        let n = self.draws as f64;
        let fails = (self.population - self.successes) as f64;
        let x = x as f64;
        (k - x) * (n - x) / ((x + 1.0) * (fails - n + x + 1.0))
    }
}

/// log P(X = x). Exact zero outside the support.
///
/// Evaluated through the saddle-point binomial decomposition
/// `P(X=x) = b(x; K, p) b(n-x; N-K, p) / b(n; N, p)` with `p = n/N`, which
/// stays accurate to near machine precision even for populations ~1e10.
pub fn log_pmf<T: Real>(params: &HypergeomParams, x: i64) -> LogValue<T> {
    let (lo, hi) = params.support();
    if x < 0 || (x as u64) < lo || (x as u64) > hi {
        return LogValue::zero();
    }
    let x = x as u64;
    if params.draws == 0 || lo == hi {
        return LogValue::one();
    }
    let big_n = params.population;
    let r = from_u64::<T>(params.successes);
    let b = from_u64::<T>(big_n - params.successes);
    let n = from_u64::<T>(params.draws);
    let p = n / from_u64::<T>(big_n);
    let q = from_u64::<T>(big_n - params.draws) / from_u64::<T>(big_n);
    let xf = from_u64::<T>(x);
    let p1 = ln_binomial_pmf(xf, r, p, q);
    let p2 = ln_binomial_pmf(n - xf, b, p, q);
    let p3 = ln_binomial_pmf(n, r + b, p, q);
    LogValue::from_ln(p1 + p2 - p3)
}

/// log P(X ≥ t), summed over the support from the side nearer the tail.
pub fn log_tail<T: Real>(params: &HypergeomParams, t: i64) -> LogValue<T> {
    let (lo, hi) = params.support();
    if t <= lo as i64 {
        return LogValue::one();
    }
    if t > hi as i64 {
        return LogValue::zero();
    }
    let t = t as u64;
    let mode = params.mode();
    if t > mode {
        // Upper tail, terms decreasing away from the mode.
        let first = log_pmf::<T>(params, t as i64);
        let mut rel = T::one();
        let mut sum = T::one();
        for x in t..hi {
            rel = rel * lit::<T>(params.ratio_up(x));
            let next = sum + rel;
            if next == sum {
                break;
            }
            sum = next;
        }
        LogValue::from_ln(first.ln() + sum.ln())
    } else {
        // 1 − P(X ≤ t−1), lower terms decreasing away from the mode.
        let first = log_pmf::<T>(params, t as i64 - 1);
        let mut rel = T::one();
        let mut sum = T::one();
        let mut x = t - 1;
        while x > lo {
            rel = rel / lit::<T>(params.ratio_up(x - 1));
            let next = sum + rel;
            if next == sum {
                break;
            }
            sum = next;
            x -= 1;
        }
        let lower = LogValue::from_ln(first.ln() + sum.ln());
        lower.complement().unwrap_or_else(LogValue::zero)
    }
}

/// Exact sampler: inverse CDF over the support visited outward from the mode.
///
/// Each draw costs O(σ) pmf-ratio steps in expectation.
#[derive(Clone, Copy, Debug)]
pub struct HypergeomSampler {
    params: HypergeomParams,
    lo: u64,
    hi: u64,
    mode: u64,
    p_mode: f64,
}

impl HypergeomSampler {
    pub fn new(params: HypergeomParams) -> Self {
        let (lo, hi) = params.support();
        let mode = params.mode();
        let p_mode = log_pmf::<f64>(&params, mode as i64).to_linear();
        Self {
            params,
            lo,
            hi,
            mode,
            p_mode,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.lo == self.hi {
            return self.lo;
        }
        loop {
            let mut u: f64 = rng.random();
            u -= self.p_mode;
            if u < 0.0 {
                return self.mode;
            }
            let (mut down, mut up) = (self.mode, self.mode);
            let (mut p_down, mut p_up) = (self.p_mode, self.p_mode);
            loop {
                let next_up = if up < self.hi {
                    p_up * self.params.ratio_up(up)
                } else {
                    -1.0
                };
                let next_down = if down > self.lo {
                    p_down / self.params.ratio_up(down - 1)
                } else {
                    -1.0
                };
                if next_up < 0.0 && next_down < 0.0 {
                    // Rounding left u uncovered; redraw.
                    break;
                }
                if next_up >= next_down {
                    up += 1;
                    p_up = next_up;
                    u -= p_up;
                    if u < 0.0 {
                        return up;
                    }
                } else {
                    down -= 1;
                    p_down = next_down;
                    u -= p_down;
                    if u < 0.0 {
                        return down;
                    }
                }
            }
        }
    }
}

pub fn sample<R: Rng + ?Sized>(params: &HypergeomParams, rng: &mut R) -> u64 {
    HypergeomSampler::new(*params).sample(rng)
}

/// Mean and variance of a G(n, m) vertex degree, i.e. of `Hypergeom(N, n-1, m)`.
///
/// `mu = 2m/n`; `sigma2 = (n-1) p (1-p) (N-(n-1)) / (N-1)` with `p = m/N`.
pub fn degree_moments<T: Real>(n: u64, m: u64) -> Result<(T, T)> {
    if n < 2 {
        return Err(invalid("degree_moments needs n >= 2"));
    }
    let big_n = n * (n - 1) / 2;
    if m < 1 || m > big_n {
        return Err(invalid(format!("m = {m} outside [1, {big_n}]")));
    }
    let mu = lit::<T>(2.0) * from_u64::<T>(m) / from_u64::<T>(n);
    if big_n == 1 {
        return Ok((mu, T::zero()));
    }
    let nn = from_u64::<T>(big_n);
    let p = from_u64::<T>(m) / nn;
    let q = from_u64::<T>(big_n - m) / nn;
    let sigma2 = from_u64::<T>(n - 1) * p * q * from_u64::<T>(big_n - (n - 1))
        / (nn - T::one());
    Ok((mu, sigma2))
}

/// Gaussian approximation Φ^c(t − a) to the tail of the standardized degree
/// under exponential tilting by `a`.
pub fn tilted_tail_gaussian<T: Real>(a: T, t: T) -> T {
    normal_sf(t - a)
}

/// DeMoivre–Laplace tail approximation and whether `x` sits inside the
/// window `1 < x < (np(1-p))^{1/6}` where it is meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmlApprox<T> {
    pub value: T,
    pub x: T,
    pub outside_validity: bool,
}

/// `P[Bin(n,p) ≥ np + h] ≈ e^{-x²/2} / (x √(2π))` with `h = x √(np(1-p))`.
pub fn binomial_tail_dml<T: Real>(n: u64, p: T, h: T) -> Result<DmlApprox<T>> {
    let var = from_u64::<T>(n) * p * (T::one() - p);
    if !(var > T::zero()) {
        return Err(invalid("binomial variance must be positive"));
    }
    if !(h > T::zero()) {
        return Err(invalid("h must be positive"));
    }
    let x = h / var.sqrt();
    let value = (-(x * x) / lit(2.0)).exp() / (x * (T::TAU()).sqrt());
    let upper = var.powf(lit(1.0 / 6.0));
    Ok(DmlApprox {
        value,
        x,
        outside_validity: x <= T::one() || x >= upper,
    })
}
