//! Random energy model: `Z = Σ_{j=1}^{n} exp(−β H_j)` with `H_j` i.i.d.
//! `N(0, M)`. Under the mapping `M = ln n`, `β = 1/√(2c)` it mirrors the
//! null likelihood ratio, with the condensation point at `c = 1/4`.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::special::StreamingLse;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemParams {
    n_energies: u64,
    variance: f64,
    beta: f64,
    c: Option<f64>,
}

impl RemParams {
    /// Arbitrary REM: `n_energies` levels with energy variance `variance`.
    pub fn new(n_energies: u64, variance: f64, beta: f64) -> Result<Self> {
        if n_energies == 0 {
            return Err(invalid("REM needs at least one energy level"));
        }
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(invalid(format!("variance must be positive, got {variance}")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(invalid(format!("beta must be nonnegative, got {beta}")));
        }
        Ok(Self {
            n_energies,
            variance,
            beta,
            c: None,
        })
    }

    /// The graph mapping: `variance = ln n`, `beta = 1/√(2c)`. `c = +inf`
    /// gives `beta = 0`.
    pub fn from_c(n_energies: u64, c: f64) -> Result<Self> {
        if n_energies < 2 {
            return Err(invalid("the ln n mapping needs n >= 2"));
        }
        if !(c > 0.0) {
            return Err(invalid(format!("c must be positive, got {c}")));
        }
        let beta = if c.is_infinite() { 0.0 } else { 1.0 / (2.0 * c).sqrt() };
        let mut p = Self::new(n_energies, (n_energies as f64).ln(), beta)?;
        p.c = Some(c);
        Ok(p)
    }

    pub fn n_energies(&self) -> u64 {
        self.n_energies
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c(&self) -> Option<f64> {
        self.c
    }

    pub fn is_graph_mapping(&self) -> bool {
        self.n_energies >= 2
            && (self.variance - (self.n_energies as f64).ln()).abs() <= 1e-12 * self.variance
    }

    /// `ln E[Z] = ln n + β² M / 2`.
    pub fn log_mean_partition(&self) -> f64 {
        (self.n_energies as f64).ln() + self.beta * self.beta * self.variance / 2.0
    }
}

/// `ln Z` for one draw of the energies, accumulated in log scale.
pub fn rem_partition<R: Rng + ?Sized>(params: &RemParams, rng: &mut R) -> f64 {
    if params.beta == 0.0 {
        return (params.n_energies as f64).ln();
    }
    let scale = params.beta * params.variance.sqrt();
    // The caller's stream only seeds a generator that is several times
    // cheaper per normal draw.
    let mut rng = Xoshiro256PlusPlus::from_rng(&mut &mut *rng);
    let mut buf = vec![0.0f64; CHUNK.min(params.n_energies as usize)];
    let mut acc = StreamingLse::new();
    let mut left = params.n_energies;
    while left > 0 {
        let chunk = &mut buf[..left.min(CHUNK as u64) as usize];
        for v in chunk.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = -scale * z;
        }
        let top = chunk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = chunk.iter().map(|v| (v - top).exp()).sum();
        acc.push(top + sum.ln());
        left -= chunk.len() as u64;
    }
    acc.value()
}

const CHUNK: usize = 4096;

/// `Z / E[Z]` under the graph mapping.
pub fn rem_normalized<R: Rng + ?Sized>(params: &RemParams, rng: &mut R) -> Result<f64> {
    if !params.is_graph_mapping() {
        return Err(invalid("Z/E[Z] is defined here only for variance = ln(n_energies)"));
    }
    Ok((rem_partition(params, rng) - params.log_mean_partition()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::stream;

    #[test]
    fn beta_zero_is_log_n() {
        let p = RemParams::from_c(1000, f64::INFINITY).unwrap();
        let mut rng = stream(1, "rem", 0, 0);
        assert_eq!(rem_partition(&p, &mut rng), 1000f64.ln());
        assert_eq!(rem_normalized(&p, &mut rng).unwrap(), 1.0);
    }

    #[test]
    fn mapping() {
        let p = RemParams::from_c(10_000, 0.25).unwrap();
        assert!((p.beta() - 2f64.sqrt()).abs() < 1e-12);
        assert!((p.variance() - 10_000f64.ln()).abs() < 1e-12);
        assert!(p.is_graph_mapping());
        assert!((p.beta() - 1.0 / (2.0 * p.c().unwrap()).sqrt()).abs() < 1e-12);
        let q = RemParams::new(100, 3.0, 1.0).unwrap();
        assert!(!q.is_graph_mapping());
        let mut rng = stream(1, "rem", 0, 0);
        assert!(rem_normalized(&q, &mut rng).is_err());
        assert!(RemParams::new(0, 1.0, 1.0).is_err());
        assert!(RemParams::from_c(10, 0.0).is_err());
    }

    #[test]
    fn log_domain_matches_naive_sum() {
        let p = RemParams::new(5000, 5000f64.ln(), 0.8).unwrap();
        let scale = p.beta() * p.variance().sqrt();
        for r in 0..5 {
            let mut a = stream(9, "naive", 0, r);
            let mut b = Xoshiro256PlusPlus::from_rng(&mut a.clone());
            let got = rem_partition(&p, &mut a);
            let naive: f64 = (0..p.n_energies())
                .map(|_| (-scale * b.sample::<f64, _>(StandardNormal)).exp())
                .sum();
            assert!(((got - naive.ln()) / naive.ln()).abs() < 1e-10);
            assert!((got.exp() - naive).abs() / naive < 1e-10);
        }
    }
}
