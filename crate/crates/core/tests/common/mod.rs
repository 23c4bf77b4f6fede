#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square p-value of `observed` counts against `probs`, after
/// pooling bins whose expected count is below 5 into one.
pub fn chi_square_p(observed: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let t = total as f64;
    let mut stat = 0.0;
    let mut bins = 0usize;
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * t;
        if e < 5.0 {
            pool_o += o as f64;
            pool_e += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pool_e > 0.0 {
        if pool_e >= 1.0 || bins == 0 {
            stat += (pool_o - pool_e).powi(2) / pool_e;
            bins += 1;
        } else {
            assert!(pool_o <= 5.0, "{pool_o} hits in bins expecting {pool_e}");
        }
    }
    assert!(bins >= 2, "need at least two usable bins");
    ChiSquared::new((bins - 1) as f64).unwrap().sf(stat)
}

/// Two-sample chi-square homogeneity p-value for equal-length count vectors.
pub fn two_sample_p(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let mut stat = 0.0;
    let mut bins = 0usize;
    let (mut pa, mut pb) = (0.0, 0.0);
    let flush = |x: f64, y: f64, stat: &mut f64, bins: &mut usize| {
        let tot = x + y;
        let (ea, eb) = (tot * na / (na + nb), tot * nb / (na + nb));
        *stat += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
        *bins += 1;
    };
    for (&x, &y) in a.iter().zip(b) {
        pa += x as f64;
        pb += y as f64;
        if pa + pb >= 10.0 {
            flush(pa, pb, &mut stat, &mut bins);
            pa = 0.0;
            pb = 0.0;
        }
    }
    if pa + pb > 0.0 {
        flush(pa, pb, &mut stat, &mut bins);
    }
    assert!(bins >= 2);
    ChiSquared::new((bins - 1) as f64).unwrap().sf(stat)
}

/// Histogram of values in `0..=max`.
pub fn counts(values: impl IntoIterator<Item = u64>, max: u64) -> Vec<u64> {
    let mut c = vec![0u64; max as usize + 1];
    for v in values {
        c[v as usize] += 1;
    }
    c
}

/// Bitmask of an edge set over pair codes.
pub fn edge_mask(edges: &[(u64, u64)]) -> u64 {
    edges
        .iter()
        .map(|&(u, v)| 1u64 << starlab::graphmodels::encode(u.min(v), u.max(v)))
        .fold(0, |a, b| a | b)
}

/// All `m`-subsets of the `N` pairs on `n` vertices as bitmasks, ascending.
pub fn all_graphs(n: u64, m: u32) -> Vec<u64> {
    let big_n = starlab::graphmodels::pair_count(n);
    (0u64..1 << big_n).filter(|g| g.count_ones() == m).collect()
}

pub fn degrees_of(mask: u64, n: u64) -> Vec<u32> {
    let mut d = vec![0u32; n as usize];
    for code in 0..64 {
        if mask >> code & 1 == 1 {
            let (i, j) = starlab::graphmodels::decode(code);
            d[i as usize] += 1;
            d[j as usize] += 1;
        }
    }
    d
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
