//! Exact samplers.
//!
//! Two routes to a uniform m-subset of pair codes:
//! * [`sample_null_edges`] draws i.i.d. codes, sorts, dedups and tops up
//!   until exactly `m` distinct codes remain. Every round is invariant under
//!   relabelling the code space, so the final set is uniform.
//! * The degree paths walk the adjacency rows `j = 1..n` (pairs `i < j`):
//!   per-row edge counts are multivariate hypergeometric, drawn as sequential
//!   univariate hypergeometrics, and each row's columns are a uniform subset
//!   (Floyd). No edge list is ever held in memory.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use super::pairs::{decode, encode, pair_count};
use super::{DegreeVector, ModelParams, PlantedSample};
use crate::error::{invalid, Result};
use crate::hypergeom::{HypergeomParams, HypergeomSampler};

/// Uniform simple graph with `m` edges as a sorted list of `(i, j)`, `i < j`.
pub fn sample_null_edges<R: Rng + ?Sized>(n: u64, m: u64, rng: &mut R) -> Result<Vec<(u64, u64)>> {
    let big_n = pair_count(n);
    if m > big_n {
        return Err(invalid(format!("m = {m} exceeds N = {big_n}")));
    }
    let m_usize = usize::try_from(m).map_err(|_| invalid("m too large for this platform"))?;
    let codes: Vec<u64> = if m == big_n {
        (0..big_n).collect()
    } else {
        let mut codes = Vec::with_capacity(m_usize);
        while codes.len() < m_usize {
            let missing = m_usize - codes.len();
            codes.extend((0..missing).map(|_| rng.random_range(0..big_n)));
            codes.sort_unstable();
            codes.dedup();
        }
        codes
    };
    Ok(codes.into_iter().map(decode).collect())
}

/// Degree vector of a uniform `m`-edge graph on `n` vertices.
pub fn sample_null_degrees<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> DegreeVector {
    let mut deg = vec![0u32; params.n() as usize];
    let mut rows = RowWalker::new(params.n());
    rows.walk(params.m(), &[], rng, |i, j| {
        deg[i as usize] += 1;
        deg[j as usize] += 1;
    });
    DegreeVector::from_raw(deg, params.m())
}

/// A planted-model graph with its edge list.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedEdges {
    pub edges: Vec<(u64, u64)>,
    pub hub: usize,
    pub leaves: Vec<usize>,
}

fn pick_star<R: Rng + ?Sized>(n: u64, k: u64, rng: &mut R) -> (u64, Vec<u64>) {
    let hub = rng.random_range(0..n);
    // k distinct uniform indices among the n−1 others (Floyd), then skip the hub.
    let others = n - 1;
    let mut chosen: HashSet<u64> = HashSet::with_capacity(k as usize);
    for t in (others - k)..others {
        let v = rng.random_range(0..=t);
        if !chosen.insert(v) {
            chosen.insert(t);
        }
    }
    let mut leaves: Vec<u64> = chosen
        .into_iter()
        .map(|v| if v >= hub { v + 1 } else { v })
        .collect();
    leaves.sort_unstable();
    (hub, leaves)
}

/// Star pairs `(row, col)` with `col < row`, sorted by row then column.
fn star_exclusions(hub: u64, leaves: &[u64]) -> Vec<(u32, u32)> {
    let mut ex: Vec<(u32, u32)> = leaves
        .iter()
        .map(|&l| {
            if l < hub {
                (hub as u32, l as u32)
            } else {
                (l as u32, hub as u32)
            }
        })
        .collect();
    ex.sort_unstable();
    ex
}

fn validate_planted(params: &ModelParams) -> Result<()> {
    if params.k() > params.n() - 1 || params.k() > params.m() {
        return Err(invalid("planted model needs k <= n-1 and k <= m"));
    }
    Ok(())
}

/// Degrees, hub and leaves of a planted-model draw: uniform hub, `k` uniform
/// incident edges, then `m − k` uniform edges among the other `N − k` pairs.
pub fn sample_planted<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<PlantedSample> {
    validate_planted(params)?;
    let (hub, leaves) = pick_star(params.n(), params.k(), rng);
    let mut deg = vec![0u32; params.n() as usize];
    deg[hub as usize] = params.k() as u32;
    for &l in &leaves {
        deg[l as usize] += 1;
    }
    let ex = star_exclusions(hub, &leaves);
    RowWalker::new(params.n()).walk(params.m() - params.k(), &ex, rng, |i, j| {
        deg[i as usize] += 1;
        deg[j as usize] += 1;
    });
    Ok(PlantedSample {
        degrees: DegreeVector::from_raw(deg, params.m()),
        hub: hub as usize,
        leaves: leaves.into_iter().map(|l| l as usize).collect(),
        coupled_null: None,
    })
}

/// Planted-model draw with the edge list materialized (sorted by code).
pub fn sample_planted_edges<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<PlantedEdges> {
    validate_planted(params)?;
    let (hub, leaves) = pick_star(params.n(), params.k(), rng);
    let ex = star_exclusions(hub, &leaves);
    let mut edges: Vec<(u64, u64)> = ex.iter().map(|&(j, i)| (u64::from(i), u64::from(j))).collect();
    RowWalker::new(params.n()).walk(params.m() - params.k(), &ex, rng, |i, j| {
        edges.push((u64::from(i), u64::from(j)));
    });
    edges.sort_unstable_by_key(|&(i, j)| encode(i, j));
    Ok(PlantedEdges {
        edges,
        hub: hub as usize,
        leaves: leaves.into_iter().map(|l| l as usize).collect(),
    })
}

/// Planted and null degree vectors driven by one uniform permutation `π` of
/// all pairs and one star `S`: the null graph is the first `m` pairs of `π`,
/// the planted graph is `S` plus the first `m − k` pairs of `π` outside `S`.
pub fn sample_coupled<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<PlantedSample> {
    validate_planted(params)?;
    let (n, m, k) = (params.n(), params.m(), params.k());
    let big_n = params.pairs();
    let (hub, leaves) = pick_star(n, k, rng);
    let star: HashSet<u64> = leaves.iter().map(|&l| encode(hub, l)).collect();

    let mut d0 = vec![0u32; n as usize];
    let mut d1 = vec![0u32; n as usize];
    d1[hub as usize] = k as u32;
    for &l in &leaves {
        d1[l as usize] += 1;
    }
    // Sparse Fisher–Yates: position t of π is fixed at step t. The first m
    // positions always contain at least m − k pairs outside S.
    let mut displaced: HashMap<u64, u64> = HashMap::with_capacity(2 * m as usize);
    let mut unplanted = 0u64;
    for t in 0..m {
        let r = rng.random_range(t..big_n);
        let at_r = displaced.get(&r).copied().unwrap_or(r);
        let at_t = displaced.get(&t).copied().unwrap_or(t);
        displaced.insert(r, at_t);
        let (i, j) = decode(at_r);
        d0[i as usize] += 1;
        d0[j as usize] += 1;
        if unplanted < m - k && !star.contains(&at_r) {
            d1[i as usize] += 1;
            d1[j as usize] += 1;
            unplanted += 1;
        }
    }
    debug_assert_eq!(unplanted, m - k);
    Ok(PlantedSample {
        degrees: DegreeVector::from_raw(d1, m),
        hub: hub as usize,
        leaves: leaves.into_iter().map(|l| l as usize).collect(),
        coupled_null: Some(DegreeVector::from_raw(d0, m)),
    })
}

/// Degree of the planted hub: `k + Hypergeom(N − k, n − 1 − k, m − k)`.
pub fn sample_center_degree<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<u64> {
    validate_planted(params)?;
    let (n, m, k) = (params.n(), params.m(), params.k());
    let h = HypergeomParams::new(params.pairs() - k, n - 1 - k, m - k)?;
    Ok(k + HypergeomSampler::new(h).sample(rng))
}

/// Row-by-row uniform subset sampler over pair codes.
struct RowWalker {
    n: u64,
    marks: Vec<u64>,
    picked: Vec<u32>,
}

impl RowWalker {
    fn new(n: u64) -> Self {
        Self {
            n,
            marks: vec![0; (n as usize).div_ceil(64)],
            picked: Vec::new(),
        }
    }

    #[inline]
    fn test_and_set(&mut self, v: u32) -> bool {
        let (w, b) = ((v >> 6) as usize, v & 63);
        let was = self.marks[w] >> b & 1 == 1;
        self.marks[w] |= 1 << b;
        was
    }

    /// Visits a uniform `draws`-subset of the pairs not listed in `excluded`
    /// (sorted `(row, col)` with `col < row`), calling `f(col, row)`.
    fn walk<R, F>(&mut self, draws: u64, excluded: &[(u32, u32)], rng: &mut R, mut f: F)
    where
        R: Rng + ?Sized,
        F: FnMut(u32, u32),
    {
        let mut pool = pair_count(self.n) - excluded.len() as u64;
        let mut remaining = draws;
        debug_assert!(remaining <= pool);
        let mut ex_at = 0usize;
        for row in 1..self.n as u32 {
            if remaining == 0 {
                break;
            }
            let ex_start = ex_at;
            while ex_at < excluded.len() && excluded[ex_at].0 == row {
                ex_at += 1;
            }
            let row_ex = &excluded[ex_start..ex_at];
            let avail = u64::from(row) - row_ex.len() as u64;
            let take = if avail == pool {
                remaining
            } else if avail == 0 {
                0
            } else {
                let h = HypergeomParams::new(pool, avail, remaining)
                    .expect("row split parameters are consistent");
                HypergeomSampler::new(h).sample(rng)
            };
            pool -= avail;
            remaining -= take;
            if take > 0 {
                self.emit_row(row, avail as u32, take as u32, row_ex, rng, &mut f);
            }
        }
        debug_assert_eq!(remaining, 0);
    }

    fn emit_row<R, F>(&mut self, row: u32, avail: u32, take: u32, row_ex: &[(u32, u32)], rng: &mut R, f: &mut F)
    where
        R: Rng + ?Sized,
        F: FnMut(u32, u32),
    {
        let to_col = |slot: u32| {
            let mut c = slot;
            for &(_, e) in row_ex {
                if e <= c {
                    c += 1;
                } else {
                    break;
                }
            }
            c
        };
        let complement = take > avail / 2;
        let marked = if complement { avail - take } else { take };
        self.picked.clear();
        for t in (avail - marked)..avail {
            let v = rng.random_range(0..=t);
            let v = if self.test_and_set(v) {
                self.test_and_set(t);
                t
            } else {
                v
            };
            self.picked.push(v);
            if !complement {
                f(to_col(v), row);
            }
        }
        if complement {
            for slot in 0..avail {
                let (w, b) = ((slot >> 6) as usize, slot & 63);
                if self.marks[w] >> b & 1 == 0 {
                    f(to_col(slot), row);
                }
            }
        }
        for &slot in &self.picked {
            self.marks[(slot >> 6) as usize] = 0;
        }
    }
}
