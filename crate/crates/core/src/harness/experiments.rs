use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{Experiment, RunConfig};
use super::enumerate::exact_enumeration;
use super::record::{jsonf64::Series, Metric, PointRecord, RunRecord, SCHEMA_VERSION};
use super::{binomial_stderr, quantile_sorted};
use crate::error::{invalid, Result};
use crate::graphmodels::{gamma_from_m, sample_null_degrees, sample_planted, ModelParams};
use crate::lrt::{decide_lr, decide_max_degree, hub_estimate, log_lr_exact, log_lr_rem_form};
use crate::rem::{rem_normalized, RemParams};
use crate::special::normal_sf;
use crate::streams::stream;

/// Quantile levels reported by the phase experiments.
pub const QUANTILES: [f64; 5] = [0.10, 0.25, 0.50, 0.75, 0.90];

// Tags shared by the γ experiments, so the same seed gives the same graphs in
// a sweep, an agreement run and a recovery run.
const TAG_NULL: &str = "window/null";
const TAG_PLANTED: &str = "window/planted";

/// Dispatches on `cfg.experiment`.
pub fn run(cfg: &RunConfig) -> Result<RunRecord> {
    match cfg.experiment {
        Experiment::TvSweep => run_tv_sweep(cfg),
        Experiment::NullPhase => run_null_phase(cfg),
        Experiment::Agreement => run_agreement(cfg),
        Experiment::Recovery => run_recovery(cfg),
        Experiment::RemPhase => run_rem_phase(cfg),
        Experiment::Enumerate => run_enumerate(cfg),
    }
}

/// Null and planted error rates of both tests along a γ grid, the TV
/// estimates `P1(Λ ≥ 1) − P0(Λ ≥ 1)`, test agreement, hub recovery and the
/// target `1 − Φ(γ/√2)`.
pub fn run_tv_sweep(cfg: &RunConfig) -> Result<RunRecord> {
    run_window(cfg, Experiment::TvSweep)
}

/// How often the likelihood-ratio and max-degree tests disagree, under each
/// hypothesis.
pub fn run_agreement(cfg: &RunConfig) -> Result<RunRecord> {
    run_window(cfg, Experiment::Agreement)
}

/// How often the maximum-degree vertex is the planted hub.
pub fn run_recovery(cfg: &RunConfig) -> Result<RunRecord> {
    run_window(cfg, Experiment::Recovery)
}

/// Quantiles of `Λ` and of its REM-form approximation under the null, along
/// a grid of `c` with `m = c k² n / ln n`.
pub fn run_null_phase(cfg: &RunConfig) -> Result<RunRecord> {
    let started = Instant::now();
    expect(cfg, Experiment::NullPhase)?;
    let base = cfg.model;
    let mut notes = Vec::new();
    let mut points = Vec::with_capacity(cfg.grid.len());
    for (idx, &c) in cfg.grid.iter().enumerate() {
        let params = ModelParams::from_c(base.n(), base.k(), c)?.with_alpha(base.alpha())?;
        note_point(&mut notes, "c", c, &params);
        let reps = parallel(cfg, |i| {
            let mut rng = stream(cfg.seed, "null_phase", idx as u64, i);
            let deg = sample_null_degrees(&params, &mut rng);
            let exact = log_lr_exact(&deg, &params)?.ln();
            let (rem, _) = log_lr_rem_form(&deg, &params)?;
            Ok([exact, rem.ln()])
        })?;
        let log_lr: Vec<f64> = reps.iter().map(|r| r[0]).collect();
        let log_rem: Vec<f64> = reps.iter().map(|r| r[1]).collect();
        let mut metrics = Vec::new();
        quantile_metrics(&mut metrics, "lambda", "log_lambda", &log_lr);
        quantile_metrics(&mut metrics, "rem_form", "log_rem_form", &log_rem);
        let kept = cfg.keep_replicates.then(|| {
            BTreeMap::from([
                ("log_lambda".to_owned(), Series(log_lr)),
                ("log_rem_form".to_owned(), Series(log_rem)),
            ])
        });
        points.push(point("c", c, &params, metrics, kept));
    }
    Ok(finish(cfg, points, notes, started))
}

/// Quantiles of `Z/E[Z]` for the random energy model with `model.n` levels,
/// energy variance `ln n` and `β = 1/√(2c)` along a grid of `c`.
pub fn run_rem_phase(cfg: &RunConfig) -> Result<RunRecord> {
    let started = Instant::now();
    expect(cfg, Experiment::RemPhase)?;
    let mut points = Vec::with_capacity(cfg.grid.len());
    for (idx, &c) in cfg.grid.iter().enumerate() {
        let rem = RemParams::from_c(cfg.model.n(), c)?;
        let ratios = parallel(cfg, |i| {
            let mut rng = stream(cfg.seed, "rem_phase", idx as u64, i);
            rem_normalized(&rem, &mut rng)
        })?;
        let logs: Vec<f64> = ratios.iter().map(|z| z.ln()).collect();
        let mut metrics = Vec::new();
        quantile_metrics(&mut metrics, "z_ratio", "log_z_ratio", &logs);
        let (mean, se) = mean_stderr(&ratios);
        metrics.push(Metric::new("z_ratio_mean", mean, se, ratios.len()));
        let kept = cfg
            .keep_replicates
            .then(|| BTreeMap::from([("log_z_ratio".to_owned(), Series(logs))]));
        points.push(PointRecord {
            grid_name: "c".into(),
            grid_value: c,
            m: cfg.model.m(),
            clamped: false,
            in_regime: true,
            metrics,
            replicate_values: kept,
        });
    }
    Ok(finish(cfg, points, Vec::new(), started))
}

fn run_enumerate(cfg: &RunConfig) -> Result<RunRecord> {
    let started = Instant::now();
    let p = cfg.model;
    let e = exact_enumeration(p.n(), p.m(), p.k())?;
    let graphs = e.graphs.len();
    let metrics = vec![
        Metric::new("tv", e.tv, 0.0, graphs),
        Metric::new("tv_ordered", e.tv_ordered, 0.0, graphs),
        Metric::new("e0_lambda", e.e0_lambda, 0.0, graphs),
    ];
    let kept = cfg.keep_replicates.then(|| {
        BTreeMap::from([("log_lambda".to_owned(), Series(e.graphs.iter().map(|g| g.log_lambda).collect()))])
    });
    let pt = point("m", p.m() as f64, &p, metrics, kept);
    Ok(finish(cfg, vec![pt], Vec::new(), started))
}

#[derive(Clone, Copy)]
struct WindowRep {
    null_lr: bool,
    null_max: bool,
    planted_lr: bool,
    planted_max: bool,
    recovered: bool,
    null_log_lr: f64,
    planted_log_lr: f64,
}

fn window_rep(params: &ModelParams, seed: u64, point: u64, i: u64) -> Result<WindowRep> {
    let mut rng = stream(seed, TAG_NULL, point, i);
    let null = sample_null_degrees(params, &mut rng);
    let null_lr = decide_lr(&null, params)?;
    let null_max = decide_max_degree(&null, params)?;

    let mut rng = stream(seed, TAG_PLANTED, point, i);
    let planted = sample_planted(params, &mut rng)?;
    let planted_lr = decide_lr(&planted.degrees, params)?;
    let planted_max = decide_max_degree(&planted.degrees, params)?;
    Ok(WindowRep {
        null_lr: null_lr.is_planted(),
        null_max: null_max.is_planted(),
        planted_lr: planted_lr.is_planted(),
        planted_max: planted_max.is_planted(),
        recovered: hub_estimate(planted.degrees.as_slice()) == planted.hub,
        null_log_lr: null_lr.statistic,
        planted_log_lr: planted_lr.statistic,
    })
}

fn run_window(cfg: &RunConfig, which: Experiment) -> Result<RunRecord> {
    let started = Instant::now();
    expect(cfg, which)?;
    let base = cfg.model;
    // Without a grid the model's own m is the single point.
    let specs: Vec<(&str, f64, ModelParams)> = if cfg.grid.is_empty() {
        vec![("m", base.m() as f64, base)]
    } else {
        cfg.grid
            .iter()
            .map(|&g| Ok(("gamma", g, ModelParams::from_gamma(base.n(), base.k(), g)?.with_alpha(base.alpha())?)))
            .collect::<Result<_>>()?
    };
    let mut notes = Vec::new();
    let mut points = Vec::with_capacity(specs.len());
    for (grid_name, grid_value, params) in specs {
        note_point(&mut notes, grid_name, grid_value, &params);
        let key = grid_value.to_bits();
        let reps = parallel(cfg, |i| window_rep(&params, cfg.seed, key, i))?;
        let r = reps.len();
        let freq = |f: &dyn Fn(&WindowRep) -> bool| reps.iter().filter(|x| f(x)).count() as f64 / r as f64;
        let rate = |name: &str, p: f64| Metric::new(name, p, binomial_stderr(p, r), r);
        let diff = |name: &str, p1: f64, p0: f64| {
            let se = binomial_stderr(p1, r).hypot(binomial_stderr(p0, r));
            Metric::new(name, p1 - p0, se, r)
        };
        let target = gamma_target(grid_name, grid_value, &params);

        let (p0_lr, p1_lr) = (freq(&|x| x.null_lr), freq(&|x| x.planted_lr));
        let (p0_max, p1_max) = (freq(&|x| x.null_max), freq(&|x| x.planted_max));
        let dis0 = freq(&|x| x.null_lr != x.null_max);
        let dis1 = freq(&|x| x.planted_lr != x.planted_max);
        let recovery = freq(&|x| x.recovered);

        let mut metrics = Vec::new();
        if which == Experiment::TvSweep {
            metrics.extend([
                rate("p0_lr", p0_lr),
                rate("p1_lr", p1_lr),
                diff("tv_lr", p1_lr, p0_lr),
                rate("p0_max", p0_max),
                rate("p1_max", p1_max),
                diff("tv_max", p1_max, p0_max),
            ]);
        }
        if matches!(which, Experiment::TvSweep | Experiment::Agreement) {
            metrics.extend([rate("disagree_null", dis0), rate("disagree_planted", dis1)]);
        }
        if matches!(which, Experiment::TvSweep | Experiment::Recovery) {
            metrics.push(rate("recovery", recovery));
        }
        if let Some(t) = target {
            metrics.push(Metric::new("target", t, 0.0, r));
        }
        let kept = cfg.keep_replicates.then(|| {
            let col = |f: &dyn Fn(&WindowRep) -> f64| Series(reps.iter().map(f).collect());
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            BTreeMap::from([
                ("null_log_lr".to_owned(), col(&|x| x.null_log_lr)),
                ("planted_log_lr".to_owned(), col(&|x| x.planted_log_lr)),
                ("null_max_planted".to_owned(), col(&|x| flag(x.null_max))),
                ("planted_max_planted".to_owned(), col(&|x| flag(x.planted_max))),
                ("recovered".to_owned(), col(&|x| flag(x.recovered))),
            ])
        });
        points.push(point(grid_name, grid_value, &params, metrics, kept));
    }
    Ok(finish(cfg, points, notes, started))
}

/// `1 − Φ(γ/√2)` for the point's γ (recovered from `m` when explicit).
fn gamma_target(grid_name: &str, grid_value: f64, params: &ModelParams) -> Option<f64> {
    let gamma = if grid_name == "gamma" {
        grid_value
    } else {
        gamma_from_m(params.n(), params.k(), params.m()).ok()?
    };
    Some(normal_sf(gamma / std::f64::consts::SQRT_2))
}

fn expect(cfg: &RunConfig, which: Experiment) -> Result<()> {
    cfg.validate()?;
    if cfg.experiment != which {
        return Err(invalid(format!("config is for {}, not {which}", cfg.experiment)));
    }
    Ok(())
}

/// Runs `f(i)` for every replicate on `cfg.threads` workers; results come
/// back in replicate order.
fn parallel<T, F>(cfg: &RunConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..cfg.replicates as u64).into_par_iter().map(&f).collect())
}

/// Quantiles in linear and log scale of values given as logs. Linear values
/// that underflow come out as 0.
fn quantile_metrics(out: &mut Vec<Metric>, linear: &str, log: &str, logs: &[f64]) {
    let mut sorted = logs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len();
    for q in QUANTILES {
        let pct = (q * 100.0).round() as u32;
        // Standard error from the spread of the order statistics one
        // binomial standard deviation either side of the quantile.
        let h = (q * (1.0 - q) / r as f64).sqrt();
        let (lo, mid, hi) = (
            quantile_sorted(&sorted, q - h),
            quantile_sorted(&sorted, q),
            quantile_sorted(&sorted, q + h),
        );
        out.push(Metric::new(format!("{log}_q{pct}"), mid, spread(lo, hi), r));
        out.push(Metric::new(format!("{linear}_q{pct}"), mid.exp(), spread(lo.exp(), hi.exp()), r));
    }
}

fn spread(lo: f64, hi: f64) -> f64 {
    if lo == hi {
        0.0
    } else {
        (hi - lo) / 2.0
    }
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let r = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / r;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

fn note_point(notes: &mut Vec<String>, grid_name: &str, value: f64, params: &ModelParams) {
    if params.clamped() {
        notes.push(format!("{grid_name}={value}: m clamped to {}", params.m()));
    }
    if !params.in_regime() {
        notes.push(format!(
            "{grid_name}={value}: n={}, k={} is outside (ln n)^2 < k < sqrt(n)",
            params.n(),
            params.k()
        ));
    }
}

fn point(
    grid_name: &str,
    grid_value: f64,
    params: &ModelParams,
    metrics: Vec<Metric>,
    replicate_values: Option<BTreeMap<String, Series>>,
) -> PointRecord {
    PointRecord {
        grid_name: grid_name.to_owned(),
        grid_value,
        m: params.m(),
        clamped: params.clamped(),
        in_regime: params.in_regime(),
        metrics,
        replicate_values,
    }
}

fn finish(cfg: &RunConfig, per_point: Vec<PointRecord>, notes: Vec<String>, started: Instant) -> RunRecord {
    RunRecord {
        schema: SCHEMA_VERSION.to_owned(),
        config: cfg.clone(),
        per_point,
        wall_time: started.elapsed().as_secs_f64(),
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(exp: Experiment, model: ModelParams, reps: usize) -> RunConfig {
        let mut c = RunConfig::new(exp, model);
        c.replicates = reps;
        c.seed = 5;
        c.threads = 1;
        c
    }

    #[test]
    fn k1_sweep_has_zero_tv() {
        let mut c = cfg(Experiment::TvSweep, ModelParams::new(100, 400, 1).unwrap(), 200);
        c.grid = vec![-1.0, 0.0, 1.0];
        let rec = run(&c).unwrap();
        assert_eq!(rec.per_point.len(), 3);
        for p in &rec.per_point {
            let tv = p.metric("tv_lr").unwrap();
            assert!(tv.estimate.abs() <= 3.0 * tv.stderr);
            assert_eq!(p.metric("p0_lr").unwrap().estimate, 1.0);
            assert!(!p.in_regime);
            for m in &p.metrics {
                assert!(m.stderr.is_finite());
                assert_eq!(m.replicates, 200);
            }
        }
        assert_eq!(rec.point(0.0).unwrap().metric("target").unwrap().estimate, 0.5);
    }

    #[test]
    fn recovery_of_a_full_star() {
        let c = cfg(Experiment::Recovery, ModelParams::new(50, 60, 49).unwrap(), 100);
        let rec = run(&c).unwrap();
        assert_eq!(rec.per_point[0].metric("recovery").unwrap().estimate, 1.0);
    }

    #[test]
    fn rem_beta_zero_row() {
        let mut c = cfg(Experiment::RemPhase, ModelParams::new(1000, 1, 1).unwrap(), 50);
        c.grid = vec![f64::INFINITY, 0.5];
        c.keep_replicates = true;
        let rec = run(&c).unwrap();
        let row = &rec.per_point[0];
        assert!(row.replicate_values.as_ref().unwrap()["log_z_ratio"].0.iter().all(|&v| v == 0.0));
        assert_eq!(row.metric("z_ratio_q50").unwrap().estimate, 1.0);
        let quantile_rows = row.metrics.iter().filter(|m| m.name.starts_with("z_ratio_q")).count();
        assert_eq!(quantile_rows, QUANTILES.len());
    }

    #[test]
    fn null_phase_needs_grid() {
        let c = cfg(Experiment::NullPhase, ModelParams::new(1000, 10, 5).unwrap(), 10);
        assert!(run(&c).is_err());
    }

    #[test]
    fn enumerate_record() {
        let c = cfg(Experiment::Enumerate, ModelParams::new(4, 3, 3).unwrap(), 1);
        let rec = run(&c).unwrap();
        assert!((rec.per_point[0].metric("tv").unwrap().estimate - 0.8).abs() < 1e-12);
    }
}
