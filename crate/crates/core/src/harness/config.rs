use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::record::jsonf64;
use crate::error::{invalid, Error, Result};
use crate::graphmodels::{ModelParams, DEFAULT_ALPHA};

pub const DEFAULT_REPLICATES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    TvSweep,
    NullPhase,
    Agreement,
    Recovery,
    RemPhase,
    Enumerate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::TvSweep => "tv_sweep",
            Self::NullPhase => "null_phase",
            Self::Agreement => "agreement",
            Self::Recovery => "recovery",
            Self::RemPhase => "rem_phase",
            Self::Enumerate => "enumerate",
        }
    }

    /// Name of the grid coordinate, if the experiment sweeps one.
    pub fn grid_name(self) -> Option<&'static str> {
        match self {
            Self::TvSweep | Self::Agreement | Self::Recovery => Some("gamma"),
            Self::NullPhase | Self::RemPhase => Some("c"),
            Self::Enumerate => None,
        }
    }

    /// Whether an empty grid is an error. The γ experiments fall back to the
    /// model's explicit `m` as a single point.
    pub fn requires_grid(self) -> bool {
        matches!(self, Self::NullPhase | Self::RemPhase)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "tv_sweep" | "sweep" => Self::TvSweep,
            "null_phase" => Self::NullPhase,
            "agreement" => Self::Agreement,
            "recovery" => Self::Recovery,
            "rem_phase" | "rem" => Self::RemPhase,
            "enumerate" => Self::Enumerate,
            _ => return Err(Error::Parse(format!("unknown experiment '{s}'"))),
        })
    }
}

/// One experiment run. For the window experiments `model.m()` is only used
/// when `grid` is empty; otherwise each grid point sets its own `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelParams,
    pub replicates: usize,
    pub seed: u64,
    pub experiment: Experiment,
    #[serde(with = "jsonf64::vec")]
    pub grid: Vec<f64>,
    /// Worker threads; 0 picks the machine default.
    pub threads: usize,
    /// Keep per-replicate values in the record.
    #[serde(default)]
    pub keep_replicates: bool,
}

impl RunConfig {
    pub fn new(experiment: Experiment, model: ModelParams) -> Self {
        Self {
            model,
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            experiment,
            grid: Vec::new(),
            threads: 0,
            keep_replicates: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(invalid("replicates must be >= 1"));
        }
        if self.experiment.requires_grid() && self.grid.is_empty() {
            return Err(invalid(format!("experiment {} needs a nonempty grid", self.experiment)));
        }
        if let Some(g) = self.grid.iter().find(|g| g.is_nan()) {
            return Err(invalid(format!("grid value {g} is not a number")));
        }
        Ok(())
    }

    /// Reads a flat `key = value` file. Recognised keys: `experiment`, `n`,
    /// `m`, `k`, `alpha`, `replicates`, `seed`, `threads`, `grid` (comma
    /// list), `keep_replicates`. Blank lines and `#` comments are skipped.
    pub fn from_kv_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_kv_str(&text)
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let kv = parse_kv(text)?;
        let get = |key: &str| kv.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let experiment: Experiment = get("experiment")
            .ok_or_else(|| Error::Parse("config is missing 'experiment'".into()))?
            .parse()?;
        let n: u64 = required(get("n"), "n")?;
        let k: u64 = match get("k") {
            Some(v) => parse_value(v, "k")?,
            None => 1,
        };
        let m: u64 = match get("m") {
            Some(v) => parse_value(v, "m")?,
            None => k,
        };
        let alpha: f64 = match get("alpha") {
            Some(v) => parse_value(v, "alpha")?,
            None => DEFAULT_ALPHA,
        };
        let model = ModelParams::new(n, m, k)?.with_alpha(alpha)?;
        let mut cfg = Self::new(experiment, model);
        if let Some(v) = get("replicates") {
            cfg.replicates = parse_value(v, "replicates")?;
        }
        if let Some(v) = get("seed") {
            cfg.seed = parse_value(v, "seed")?;
        }
        if let Some(v) = get("threads") {
            cfg.threads = parse_value(v, "threads")?;
        }
        if let Some(v) = get("grid") {
            cfg.grid = parse_list(v)?;
        }
        if let Some(v) = get("keep_replicates") {
            cfg.keep_replicates = parse_value(v, "keep_replicates")?;
        }
        let known = [
            "experiment", "n", "m", "k", "alpha", "replicates", "seed", "threads", "grid", "keep_replicates",
        ];
        if let Some((k, _)) = kv.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown config key '{k}'")));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

fn parse_value<T: FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {key} = '{v}'")))
}

fn required<T: FromStr>(v: Option<&str>, key: &str) -> Result<T> {
    parse_value(v.ok_or_else(|| Error::Parse(format!("config is missing '{key}'")))?, key)
}

/// Comma-separated reals; `inf` is accepted.
pub fn parse_list(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(s, "grid"))
        .collect()
}
