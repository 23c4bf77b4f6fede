//! Exact cumulants of the standardized hypergeometric variable and the
//! Stirling-number bound on them.

use super::{log_pmf, HypergeomParams};
use crate::error::{invalid, Error, Result};
use crate::special::{from_u64, Real};

/// Largest support for which exact moment sums are attempted.
pub const MAX_CUMULANT_SUPPORT: u64 = 1_000_000;

/// Cumulants κ_1..κ_{r_max} of `Y = (X − E X)/sd(X)`, from exact central
/// moments and the moment–cumulant recursion
/// `κ_n = m_n − Σ_{i=1}^{n−1} C(n−1, i−1) κ_i m_{n−i}`.
pub fn exact_cumulants<T: Real>(params: &HypergeomParams, r_max: usize) -> Result<Vec<T>> {
    if r_max == 0 || r_max > 8 {
        return Err(invalid(format!("r_max must be in 1..=8, got {r_max}")));
    }
    let len = params.support_len();
    if len > MAX_CUMULANT_SUPPORT {
        return Err(Error::Capacity {
            what: "hypergeometric support",
            size: len.into(),
            limit: MAX_CUMULANT_SUPPORT.into(),
        });
    }
    let mean = params.mean::<T>();
    let var = params.variance::<T>();
    if !(var > T::zero()) {
        return Err(invalid("degenerate distribution has no standardized cumulants"));
    }
    let sd = var.sqrt();
    let (lo, hi) = params.support();

    let mut raw = vec![T::zero(); r_max + 1];
    for x in lo..=hi {
        let w = log_pmf::<T>(params, x as i64).to_linear();
        let y = (from_u64::<T>(x) - mean) / sd;
        let mut pw = w;
        for slot in raw.iter_mut().skip(1) {
            pw = pw * y;
            *slot = *slot + pw;
        }
    }

    let mut kappa = vec![T::zero(); r_max + 1];
    for n in 1..=r_max {
        let mut k = raw[n];
        for i in 1..n {
            k = k - binom_small::<T>(n - 1, i - 1) * kappa[i] * raw[n - i];
        }
        kappa[n] = k;
    }
    kappa.remove(0);
    Ok(kappa)
}

fn binom_small<T: Real>(n: usize, k: usize) -> T {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i as u64 + 1);
    }
    from_u64(acc)
}

/// Stirling numbers of the second kind S(r, q), by the triangle
/// `S(r, q) = q S(r−1, q) + S(r−1, q−1)`.
pub fn stirling2(r: usize, q: usize) -> u128 {
    let mut row = vec![0u128; r + 1];
    row[0] = 1;
    for n in 1..=r {
        for j in (1..=n).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    if q > r {
        0
    } else {
        row[q]
    }
}

/// `A_r = Σ_{q=1}^{r} (q−1)! S(r, q)`, computed in the scalar type.
pub fn fubini_sum<T: Real>(r: usize) -> T {
    let mut row = vec![T::zero(); r + 1];
    row[0] = T::one();
    for n in 1..=r {
        for j in (1..=n).rev() {
            row[j] = from_u64::<T>(j as u64) * row[j] + row[j - 1];
        }
        row[0] = T::zero();
    }
    let mut fact = T::one();
    let mut total = T::zero();
    for (q, s) in row.iter().enumerate().skip(1) {
        if q > 1 {
            fact = fact * from_u64::<T>(q as u64 - 1);
        }
        total = total + fact * *s;
    }
    total
}

/// `(2 / σ^{r−2}) Σ_{q=1}^{r} (q−1)! S(r, q)`, an upper bound on |κ_r(Y)|
/// for a standardized hypergeometric `Y` with standard deviation `σ`.
pub fn stirling_cumulant_bound<T: Real>(r: usize, sigma: T) -> Result<T> {
    if r < 3 {
        return Err(invalid(format!("cumulant bound needs r >= 3, got {r}")));
    }
    if !(sigma > T::zero()) {
        return Err(invalid("sigma must be positive"));
    }
    let two = T::one() + T::one();
    Ok(two * fubini_sum::<T>(r) / sigma.powi(r as i32 - 2))
}
