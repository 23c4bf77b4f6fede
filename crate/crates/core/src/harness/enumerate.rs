use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphmodels::{decode, DegreeVector, ModelParams};
use crate::lrt::log_lr_exact;

/// Largest number of graphs `C(N, m)` enumerated.
pub const MAX_ENUMERATION: u128 = 1_000_000;
const MAX_VERTICES: u64 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedGraph {
    pub edges: Vec<(u64, u64)>,
    pub degrees: Vec<u32>,
    pub log_lambda: f64,
    pub lambda: f64,
    pub p0: f64,
    pub p1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub params: ModelParams,
    /// `½ Σ_G |P1(G) − P0(G)|`.
    pub tv: f64,
    /// `P1(Λ ≥ 1) − P0(Λ ≥ 1)`.
    pub tv_ordered: f64,
    /// `E0[Λ]`.
    pub e0_lambda: f64,
    pub graphs: Vec<EnumeratedGraph>,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * u128::from(n - i) / u128::from(i + 1);
    }
    r
}

/// Every `m`-edge graph on `n ≤ 6` vertices with its null and planted
/// probabilities. `P1` comes from counting stars, `P1(G) ∝ Σ_i C(d_i, k)`,
/// while `Λ` comes from [`log_lr_exact`], so the two are checked against
/// each other through `E0[Λ]` and the two TV forms.
pub fn exact_enumeration(n: u64, m: u64, k: u64) -> Result<Enumeration> {
    let params = ModelParams::new(n, m, k)?;
    if n > MAX_VERTICES {
        return Err(Error::Capacity {
            what: "enumeration vertices",
            size: u128::from(n),
            limit: u128::from(MAX_VERTICES),
        });
    }
    let big_n = params.pairs();
    let total = binomial(big_n, m);
    if total > MAX_ENUMERATION {
        return Err(Error::Capacity {
            what: "enumerated graphs",
            size: total,
            limit: MAX_ENUMERATION,
        });
    }
    let star_total = u128::from(n) * binomial(n - 1, k) * binomial(big_n - k, m - k);
    let pairs: Vec<(u64, u64)> = (0..big_n).map(decode).collect();

    let mut graphs = Vec::with_capacity(total as usize);
    let mut weight_sum: u128 = 0;
    let mut idx: Vec<usize> = (0..m as usize).collect();
    loop {
        let mut deg = vec![0u32; n as usize];
        let edges: Vec<(u64, u64)> = idx.iter().map(|&t| pairs[t]).collect();
        for &(i, j) in &edges {
            deg[i as usize] += 1;
            deg[j as usize] += 1;
        }
        let w: u128 = deg.iter().map(|&d| binomial(u64::from(d), k)).sum();
        weight_sum += w;
        let log_lambda = log_lr_exact(&DegreeVector::new(deg.clone(), m)?, &params)?.ln();
        graphs.push(EnumeratedGraph {
            edges,
            degrees: deg,
            log_lambda,
            lambda: log_lambda.exp(),
            p0: 1.0 / total as f64,
            p1: w as f64 / star_total as f64,
        });
        if !next_combination(&mut idx, big_n as usize) {
            break;
        }
    }
    if weight_sum != star_total {
        return Err(Error::Inconsistent(format!(
            "star counts sum to {weight_sum}, expected {star_total}"
        )));
    }

    let tv = 0.5 * graphs.iter().map(|g| (g.p1 - g.p0).abs()).sum::<f64>();
    let tv_ordered = graphs
        .iter()
        .filter(|g| g.log_lambda >= 0.0)
        .map(|g| g.p1 - g.p0)
        .sum::<f64>();
    let e0_lambda = graphs.iter().map(|g| g.lambda * g.p0).sum::<f64>();
    Ok(Enumeration {
        params,
        tv,
        tv_ordered,
        e0_lambda,
        graphs,
    })
}

/// Advances `idx` to the next `idx.len()`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] < n - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
