//! `starlab`: samplers, test statistics and Monte Carlo experiments for a
//! planted star in G(n, m).

mod svg;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, CommandFactory, Parser, Subcommand, ValueEnum};

use starlab::graphmodels::io::{read_degrees_csv, write_degrees_csv, write_edges_csv};
use starlab::graphmodels::{
    sample_null_degrees, sample_null_edges, sample_planted, sample_planted_edges, DegreeVector, ModelParams,
};
use starlab::harness::{self, Experiment, RunConfig, RunRecord};
use starlab::lrt::{decide_lr, decide_max_degree, hub_estimate, log_lr_rem_form};
use starlab::streams::stream;

const RESULTS_DIR_VAR: &str = "STARLAB_RESULTS_DIR";

#[derive(Parser)]
#[command(
    name = "starlab",
    version,
    about = "Detecting a planted star in G(n, m): samplers, tests and Monte Carlo experiments",
    after_help = "Environment:\n  STARLAB_RESULTS_DIR  when set, experiment results without --out are written\n                       there as <experiment>-seed<seed>.<csv|json>"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw one graph and write its degrees (or edges) as CSV.
    Sample(SampleArgs),
    /// Exact log-likelihood ratio and decision for a degree file.
    Lr(LrArgs),
    /// Max-degree test on a degree file or a freshly sampled graph.
    Test(TestArgs),
    /// TV estimates of both tests along a γ grid.
    Sweep(SweepArgs),
    /// Null quantiles of Λ along a c grid.
    NullPhase(PhaseArgs),
    /// Disagreement of the likelihood-ratio and max-degree tests.
    Agreement(WindowArgs),
    /// Hub recovery by the maximum-degree vertex along a γ grid.
    Recovery(SweepArgs),
    /// Quantiles of Z/E[Z] for the random energy model along a c grid.
    Rem(RemArgs),
    /// Exact enumeration of all m-edge graphs on n <= 6 vertices.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Replicates per grid point (per hypothesis) [default: 2000]
    #[arg(long)]
    reps: Option<usize>,
    /// Base seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores [default: 0]
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (standard output if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from a .json --out, CSV otherwise
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Flat key = value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Keep per-replicate values in JSON output
    #[arg(long)]
    keep_replicates: bool,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    n: Option<u64>,
    /// Edge count, used when no --gamma grid is given
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    /// Max-degree threshold exponent [default: 2]
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated γ values
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Vec<f64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    window: WindowArgs,
    /// Also write an SVG curve with the analytic target overlaid
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated c values (m = c k² n / ln n)
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RemArgs {
    /// Number of energy levels
    #[arg(long)]
    n: Option<u64>,
    /// Comma-separated c values (β = 1/√(2c)); `inf` gives β = 0
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    k: u64,
    /// Write the per-graph table instead of the summary
    #[arg(long)]
    table: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
#[group(skip)]
#[command(group(ArgGroup::new("hypothesis").required(true).args(["null", "planted"])))]
struct SampleArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    /// Star size, required with --planted
    #[arg(long)]
    k: Option<u64>,
    /// Draw from the uniform G(n, m)
    #[arg(long)]
    null: bool,
    /// Draw from the planted-star model
    #[arg(long)]
    planted: bool,
    /// Write the edge list (u,v) instead of degrees
    #[arg(long)]
    edges: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LrArgs {
    /// Degree CSV with header "degree"
    #[arg(long)]
    degrees: PathBuf,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(skip)]
#[command(group(ArgGroup::new("source").required(true).args(["null", "planted", "degrees"])))]
struct TestArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, default_value_t = starlab::graphmodels::DEFAULT_ALPHA)]
    alpha: f64,
    /// Test one G(n, m) sample
    #[arg(long)]
    null: bool,
    /// Test one planted-model sample
    #[arg(long)]
    planted: bool,
    /// Test the degrees in this CSV file
    #[arg(long)]
    degrees: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(ErrorKind, String),
    Runtime(String),
}

impl From<starlab::Error> for Failure {
    fn from(e: starlab::Error) -> Self {
        match e {
            starlab::Error::InvalidParams(msg) => Failure::Usage(ErrorKind::ValueValidation, msg),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(kind, msg)) => Cli::command().error(kind, msg).exit(),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Sample(a) => sample(a),
        Cmd::Lr(a) => lr(a),
        Cmd::Test(a) => test(a),
        Cmd::Sweep(a) => window(Experiment::TvSweep, a.window, a.svg),
        Cmd::Agreement(a) => window(Experiment::Agreement, a, None),
        Cmd::Recovery(a) => window(Experiment::Recovery, a.window, a.svg),
        Cmd::NullPhase(a) => {
            let k = a.k;
            experiment(Experiment::NullPhase, &a.run, a.n, None, k, a.alpha, a.c, None)
        }
        Cmd::Rem(a) => experiment(Experiment::RemPhase, &a.run, a.n, Some(1), Some(1), None, a.c, None),
        Cmd::Enumerate(a) => enumerate(a),
    }
}

fn missing(flag: &str) -> Failure {
    Failure::Usage(
        ErrorKind::MissingRequiredArgument,
        format!("the flag --{flag} is required (or set it in --config)"),
    )
}

fn window(exp: Experiment, a: WindowArgs, svg: Option<PathBuf>) -> Outcome {
    experiment(exp, &a.run, a.n, a.m, a.k, a.alpha, a.gamma, svg)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    exp: Experiment,
    run: &RunArgs,
    n: Option<u64>,
    m: Option<u64>,
    k: Option<u64>,
    alpha: Option<f64>,
    grid: Vec<f64>,
    svg: Option<PathBuf>,
) -> Outcome {
    let file = match &run.config {
        Some(path) => {
            let cfg = RunConfig::from_kv_file(path)?;
            if cfg.experiment != exp {
                return Err(Failure::Usage(
                    ErrorKind::ArgumentConflict,
                    format!("config {} is for {}, not {exp}", path.display(), cfg.experiment),
                ));
            }
            Some(cfg)
        }
        None => None,
    };
    let base = file.as_ref().map(|c| c.model);
    let n = n.or(base.map(|b| b.n())).ok_or_else(|| missing("n"))?;
    let k = k.or(base.map(|b| b.k())).ok_or_else(|| missing("k"))?;
    let grid = if grid.is_empty() {
        file.as_ref().map(|c| c.grid.clone()).unwrap_or_default()
    } else {
        grid
    };
    let grid_flag = if exp.grid_name() == Some("c") { "c" } else { "gamma" };
    if exp.requires_grid() && grid.is_empty() {
        return Err(missing(grid_flag));
    }
    let m = match m.or(base.map(|b| b.m())) {
        Some(m) => m,
        None if !grid.is_empty() => k,
        None => {
            return Err(Failure::Usage(
                ErrorKind::MissingRequiredArgument,
                format!("either --{grid_flag} or --m is required"),
            ))
        }
    };
    let alpha = alpha.or(base.map(|b| b.alpha())).unwrap_or(starlab::graphmodels::DEFAULT_ALPHA);
    let mut cfg = file.unwrap_or_else(|| RunConfig::new(exp, ModelParams::new(2, 1, 1).expect("valid")));
    cfg.model = ModelParams::new(n, m, k)?.with_alpha(alpha)?;
    cfg.grid = grid;
    if let Some(r) = run.reps {
        cfg.replicates = r;
    }
    if let Some(s) = run.seed {
        cfg.seed = s;
    }
    if let Some(t) = run.threads {
        cfg.threads = t;
    }
    cfg.keep_replicates |= run.keep_replicates;
    cfg.validate()?;

    let points = cfg.grid.len().max(1);
    eprintln!("{exp}: {points} point(s) x {} replicates, seed {}", cfg.replicates, cfg.seed);
    let record = harness::run(&cfg)?;
    for note in &record.notes {
        eprintln!("note: {note}");
    }
    eprintln!("{exp}: done in {:.1}s", record.wall_time);

    let out = resolve_out(run.out.clone(), &format!("{exp}-seed{}", cfg.seed), run.format)?;
    let format = resolve_format(run.format, out.as_deref());
    write_output(out.as_deref(), |w| match format {
        Format::Csv => harness::write_csv(&record, w),
        Format::Json => harness::write_json(&record, w),
    })?;
    if let Some(path) = svg {
        std::fs::write(&path, render_svg(&record))?;
    }
    Ok(())
}

fn render_svg(record: &RunRecord) -> String {
    let (metric, title, label) = match record.config.experiment {
        Experiment::Recovery => ("recovery", "Hub recovery by maximum degree", "P(hub recovered)"),
        _ => ("tv_lr", "Total variation, likelihood-ratio test", "TV estimate"),
    };
    let points: Vec<svg::Point> = record
        .per_point
        .iter()
        .filter_map(|p| {
            let m = p.metric(metric)?;
            let gamma = if p.grid_name == "gamma" {
                p.grid_value
            } else {
                starlab::graphmodels::gamma_from_m(record.config.model.n(), record.config.model.k(), p.m).ok()?
            };
            Some(svg::Point {
                gamma,
                estimate: m.estimate,
                stderr: m.stderr,
            })
        })
        .collect();
    let cfg = &record.config;
    let title = format!("{title} (n={}, k={}, {} reps)", cfg.model.n(), cfg.model.k(), cfg.replicates);
    svg::curve(&title, label, &points)
}

fn resolve_format(flag: Option<Format>, out: Option<&Path>) -> Format {
    flag.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    })
}

fn resolve_out(out: Option<PathBuf>, stem: &str, format: Option<Format>) -> Result<Option<PathBuf>, Failure> {
    if out.is_some() {
        return Ok(out);
    }
    match std::env::var_os(RESULTS_DIR_VAR) {
        Some(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            std::fs::create_dir_all(&dir)?;
            let ext = match format {
                Some(Format::Json) => "json",
                _ => "csv",
            };
            Ok(Some(dir.join(format!("{stem}.{ext}"))))
        }
        _ => Ok(None),
    }
}

fn write_output<F>(out: Option<&Path>, f: F) -> Outcome
where
    F: FnOnce(&mut dyn Write) -> starlab::Result<()>,
{
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_table(out: Option<&Path>, rows: &[(&str, String)]) -> Outcome {
    write_output(out, |w| {
        writeln!(w, "quantity,value")?;
        for (k, v) in rows {
            writeln!(w, "{k},{v}")?;
        }
        Ok(())
    })
}

fn sample(a: SampleArgs) -> Outcome {
    let k = match (a.planted, a.k) {
        (true, None) => return Err(missing("k")),
        (_, k) => k.unwrap_or(1),
    };
    let params = ModelParams::new(a.n, a.m, if a.planted { k } else { 1 })?;
    let mut rng = stream(a.seed, "cli/sample", 0, 0);
    let out = a.out.as_deref();
    if a.planted {
        if a.edges {
            let g = sample_planted_edges(&params, &mut rng)?;
            eprintln!("hub: {}", g.hub);
            write_output(out, |w| write_edges_csv(w, &g.edges))
        } else {
            let g = sample_planted(&params, &mut rng)?;
            eprintln!("hub: {}", g.hub);
            write_output(out, |w| write_degrees_csv(w, g.degrees.as_slice()))
        }
    } else if a.edges {
        let edges = sample_null_edges(a.n, a.m, &mut rng)?;
        write_output(out, |w| write_edges_csv(w, &edges))
    } else {
        let deg = sample_null_degrees(&params, &mut rng);
        write_output(out, |w| write_degrees_csv(w, deg.as_slice()))
    }
}

fn read_degrees(path: &Path, params: &ModelParams) -> Result<DegreeVector, Failure> {
    let file = File::open(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    let deg = DegreeVector::new(read_degrees_csv(io::BufReader::new(file))?, params.m())?;
    deg.check_against(params)?;
    Ok(deg)
}

fn decision(planted: bool) -> String {
    if planted { "planted" } else { "null" }.to_owned()
}

fn lr(a: LrArgs) -> Outcome {
    let params = ModelParams::new(a.n, a.m, a.k)?;
    let deg = read_degrees(&a.degrees, &params)?;
    let outcome = decide_lr(&deg, &params)?;
    let (rem, _) = log_lr_rem_form(&deg, &params)?;
    write_table(
        a.out.as_deref(),
        &[
            ("log_lr", outcome.statistic.to_string()),
            ("lambda", outcome.statistic.exp().to_string()),
            ("log_rem_form", rem.ln().to_string()),
            ("decision", decision(outcome.is_planted())),
        ],
    )
}

fn test(a: TestArgs) -> Outcome {
    let params = ModelParams::new(a.n, a.m, a.k)?.with_alpha(a.alpha)?;
    let mut rng = stream(a.seed, "cli/test", 0, 0);
    let (deg, hub) = if let Some(path) = &a.degrees {
        (read_degrees(path, &params)?, None)
    } else if a.planted {
        let s = sample_planted(&params, &mut rng)?;
        (s.degrees, Some(s.hub))
    } else {
        (sample_null_degrees(&params, &mut rng), None)
    };
    let outcome = decide_max_degree(&deg, &params)?;
    let mut rows = vec![
        ("t_star", outcome.threshold.to_string()),
        ("max_degree", outcome.statistic.to_string()),
        ("decision", decision(outcome.is_planted())),
        ("hub_estimate", hub_estimate(deg.as_slice()).to_string()),
    ];
    if let Some(h) = hub {
        rows.push(("hub", h.to_string()));
    }
    write_table(a.out.as_deref(), &rows)
}

fn enumerate(a: EnumerateArgs) -> Outcome {
    let e = harness::exact_enumeration(a.n, a.m, a.k)?;
    let format = resolve_format(a.format, a.out.as_deref());
    let out = a.out.as_deref();
    if a.table {
        return write_output(out, |w| {
            writeln!(w, "graph,edges,degrees,log_lambda,lambda,p0,p1")?;
            for (i, g) in e.graphs.iter().enumerate() {
                let edges: Vec<String> = g.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
                let degs: Vec<String> = g.degrees.iter().map(u32::to_string).collect();
                writeln!(
                    w,
                    "{i},{},{},{},{},{},{}",
                    edges.join(" "),
                    degs.join(" "),
                    g.log_lambda,
                    g.lambda,
                    g.p0,
                    g.p1
                )?;
            }
            Ok(())
        });
    }
    let mut cfg = RunConfig::new(Experiment::Enumerate, e.params);
    cfg.replicates = 1;
    cfg.threads = 1;
    let record = harness::run(&cfg)?;
    write_output(out, |w| match format {
        Format::Csv => harness::write_csv(&record, w),
        Format::Json => harness::write_json(&record, w),
    })
}
