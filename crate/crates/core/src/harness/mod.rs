//! Seeded, parallel Monte Carlo experiments, exact small-instance
//! enumeration, and result persistence.

mod config;
mod enumerate;
mod experiments;
mod record;

pub use config::{parse_list, Experiment, RunConfig, DEFAULT_REPLICATES};
pub use enumerate::{exact_enumeration, EnumeratedGraph, Enumeration, MAX_ENUMERATION};
pub use experiments::{run, run_agreement, run_null_phase, run_recovery, run_rem_phase, run_tv_sweep, QUANTILES};
pub use record::{load, persist, write_csv, write_json, Metric, PointRecord, RunRecord, CSV_COLUMNS, SCHEMA_VERSION};

/// Linear-interpolation quantile of an ascending slice (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        return a;
    }
    a + (h - lo as f64) * (b - a)
}

/// Binomial standard error `√(p(1−p)/r)` of a frequency estimate.
pub fn binomial_stderr(p: f64, replicates: usize) -> f64 {
    (p * (1.0 - p) / replicates as f64).max(0.0).sqrt()
}
