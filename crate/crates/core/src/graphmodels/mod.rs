//! Null `G(n, m)` and planted-star models, their exact samplers, and the
//! scaling-window arithmetic that places `m` relative to the star size.

pub mod io;
pub mod pairs;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
pub use pairs::{decode, encode, pair_count};
pub use sampling::{
    sample_center_degree, sample_coupled, sample_null_degrees, sample_null_edges,
    sample_planted, sample_planted_edges, PlantedEdges,
};

/// How `m` was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Explicit,
    Gamma { gamma: f64 },
    C { c: f64 },
}

/// A problem instance: `n` vertices, `m` edges, a planted `k`-star, and the
/// max-degree threshold exponent `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: u64,
    m: u64,
    k: u64,
    alpha: f64,
    window: Window,
    clamped: bool,
}

pub const DEFAULT_ALPHA: f64 = 2.0;

impl ModelParams {
    pub fn new(n: u64, m: u64, k: u64) -> Result<Self> {
        Self::build(n, m, k, Window::Explicit, false)
    }

    /// `m` from the fine window coordinate `gamma`.
    pub fn from_gamma(n: u64, k: u64, gamma: f64) -> Result<Self> {
        let w = m_from_gamma(n, k, gamma)?;
        Self::build(n, w.m, k, Window::Gamma { gamma }, w.clamped)
    }

    /// `m` from the coarse window coordinate `c`.
    pub fn from_c(n: u64, k: u64, c: f64) -> Result<Self> {
        let w = m_from_c(n, k, c)?;
        Self::build(n, w.m, k, Window::C { c }, w.clamped)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    fn build(n: u64, m: u64, k: u64, window: Window, clamped: bool) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("n must be >= 2, got {n}")));
        }
        if n > u64::from(u32::MAX) {
            return Err(invalid(format!("n = {n} exceeds the supported vertex range")));
        }
        if k < 1 || k > n - 1 {
            return Err(invalid(format!("k must lie in [1, n-1], got {k}")));
        }
        let big_n = pair_count(n);
        if m < k || m > big_n {
            return Err(invalid(format!("m must lie in [k, N] = [{k}, {big_n}], got {m}")));
        }
        Ok(Self {
            n,
            m,
            k,
            alpha: DEFAULT_ALPHA,
            window,
            clamped,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Whether the window formula had to be clamped into `[k, N]`.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    /// `N = n(n−1)/2`.
    pub fn pairs(&self) -> u64 {
        pair_count(self.n)
    }

    /// Edge density `m / N`.
    pub fn p(&self) -> f64 {
        self.m as f64 / self.pairs() as f64
    }

    /// Whether `(ln n)² < k < √n`, the regime where the asymptotic results apply.
    pub fn in_regime(&self) -> bool {
        let ln = (self.n as f64).ln();
        let k = self.k as f64;
        ln * ln < k && k < (self.n as f64).sqrt()
    }
}

/// An `m` derived from a window formula, with a flag when clamping was needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowM {
    pub m: u64,
    pub clamped: bool,
}

fn check_window_args(n: u64, k: u64) -> Result<()> {
    if n < 3 {
        return Err(invalid(format!("window formulas need n >= 3, got {n}")));
    }
    if k < 1 || k > n - 1 {
        return Err(invalid(format!("k must lie in [1, n-1], got {k}")));
    }
    Ok(())
}

fn round_clamped(raw: f64, n: u64, k: u64) -> Result<WindowM> {
    if raw.is_nan() {
        return Err(invalid("window formula produced NaN"));
    }
    let big_n = pair_count(n);
    let rounded = raw.round();
    if rounded < k as f64 {
        Ok(WindowM { m: k, clamped: true })
    } else if rounded > big_n as f64 {
        Ok(WindowM {
            m: big_n,
            clamped: true,
        })
    } else {
        Ok(WindowM {
            m: rounded as u64,
            clamped: false,
        })
    }
}

/// `m = (k² n / (4 ln n)) (1 + γ/√(ln n))`, rounded and clamped to `[k, N]`.
pub fn m_from_gamma(n: u64, k: u64, gamma: f64) -> Result<WindowM> {
    check_window_args(n, k)?;
    let ln = (n as f64).ln();
    let kf = k as f64;
    let raw = kf * kf * n as f64 / (4.0 * ln) * (1.0 + gamma / ln.sqrt());
    round_clamped(raw, n, k)
}

/// Inverse of [`m_from_gamma`] before rounding: `γ = (4 m ln n / (k² n) − 1) √(ln n)`.
pub fn gamma_from_m(n: u64, k: u64, m: u64) -> Result<f64> {
    check_window_args(n, k)?;
    let ln = (n as f64).ln();
    let kf = k as f64;
    Ok((4.0 * m as f64 * ln / (kf * kf * n as f64) - 1.0) * ln.sqrt())
}

/// `m = c k² n / ln n`, rounded and clamped to `[k, N]`.
pub fn m_from_c(n: u64, k: u64, c: f64) -> Result<WindowM> {
    check_window_args(n, k)?;
    if !(c > 0.0) {
        return Err(invalid(format!("c must be positive, got {c}")));
    }
    let ln = (n as f64).ln();
    let kf = k as f64;
    round_clamped(c * kf * kf * n as f64 / ln, n, k)
}

/// Vertex degrees of a graph with `m` edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeVector {
    degrees: Vec<u32>,
    m: u64,
}

impl DegreeVector {
    /// Validates the handshake identity and the per-vertex range.
    pub fn new(degrees: Vec<u32>, m: u64) -> Result<Self> {
        let n = degrees.len() as u64;
        if n < 2 {
            return Err(invalid("degree vector needs at least 2 vertices"));
        }
        let sum: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
        if sum != 2 * m {
            return Err(Error::Inconsistent(format!(
                "degree sum {sum} != 2m = {}",
                2 * m
            )));
        }
        if let Some(&d) = degrees.iter().find(|&&d| u64::from(d) > n - 1) {
            return Err(Error::Inconsistent(format!("degree {d} exceeds n-1 = {}", n - 1)));
        }
        Ok(Self { degrees, m })
    }

    pub(crate) fn from_raw(degrees: Vec<u32>, m: u64) -> Self {
        debug_assert_eq!(degrees.iter().map(|&d| u64::from(d)).sum::<u64>(), 2 * m);
        Self { degrees, m }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.degrees
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.degrees
    }

    pub fn n(&self) -> u64 {
        self.degrees.len() as u64
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn max(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Fails unless `n` and `m` agree with `params`.
    pub fn check_against(&self, params: &ModelParams) -> Result<()> {
        if self.n() != params.n() || self.m != params.m() {
            return Err(Error::Inconsistent(format!(
                "degree vector has n={}, m={} but params have n={}, m={}",
                self.n(),
                self.m,
                params.n(),
                params.m()
            )));
        }
        Ok(())
    }
}

/// A draw from the planted model; `coupled_null` is set by [`sample_coupled`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedSample {
    pub degrees: DegreeVector,
    pub hub: usize,
    /// Sorted leaf indices.
    pub leaves: Vec<usize>,
    pub coupled_null: Option<DegreeVector>,
}

impl PlantedSample {
    pub fn is_leaf(&self, v: usize) -> bool {
        self.leaves.binary_search(&v).is_ok()
    }

    /// Counts violations of the structural invariants, including the
    /// coupling domination `d1[i] ≤ d0[i] + [i ∈ leaves]` (and `+k` at the hub).
    pub fn invariant_violations(&self) -> usize {
        let d1 = self.degrees.as_slice();
        let k = self.leaves.len() as u32;
        let mut bad = 0;
        if self.is_leaf(self.hub) {
            bad += 1;
        }
        if d1[self.hub] < k {
            bad += 1;
        }
        if let Some(null) = &self.coupled_null {
            let d0 = null.as_slice();
            for i in 0..d1.len() {
                let slack = if i == self.hub {
                    k
                } else {
                    u32::from(self.is_leaf(i))
                };
                if d1[i] > d0[i] + slack {
                    bad += 1;
                }
            }
        }
        bad
    }
}
