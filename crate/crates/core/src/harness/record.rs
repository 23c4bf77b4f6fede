use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "v1";

pub const CSV_COLUMNS: [&str; 12] = [
    "experiment", "n", "m", "k", "alpha", "grid_name", "grid_value", "metric", "estimate", "stderr",
    "replicates", "seed",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    #[serde(with = "jsonf64")]
    pub estimate: f64,
    #[serde(with = "jsonf64")]
    pub stderr: f64,
    pub replicates: usize,
}

impl Metric {
    pub fn new(name: impl Into<String>, estimate: f64, stderr: f64, replicates: usize) -> Self {
        Self {
            name: name.into(),
            estimate,
            stderr,
            replicates,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub grid_name: String,
    #[serde(with = "jsonf64")]
    pub grid_value: f64,
    pub m: u64,
    pub clamped: bool,
    pub in_regime: bool,
    pub metrics: Vec<Metric>,
    /// Per-replicate values by name, in replicate order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate_values: Option<BTreeMap<String, jsonf64::Series>>,
}

impl PointRecord {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub config: RunConfig,
    pub per_point: Vec<PointRecord>,
    pub wall_time: f64,
    pub tool_version: String,
    /// Warnings such as clamped window values or out-of-regime parameters.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl RunRecord {
    pub fn point(&self, grid_value: f64) -> Option<&PointRecord> {
        self.per_point.iter().find(|p| p.grid_value == grid_value)
    }
}

pub fn persist(record: &RunRecord, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_json(record, std::io::BufWriter::new(file))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<W: Write>(record: &RunRecord, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, record)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<RunRecord> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text)
}

pub(crate) fn from_json(text: &str) -> Result<RunRecord> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let found = value.get("schema").and_then(|s| s.as_str()).unwrap_or("<missing>");
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: found.to_owned(),
            expected: SCHEMA_VERSION.to_owned(),
        });
    }
    Ok(serde_json::from_value(value)?)
}

/// One row per grid point and metric, columns as in [`CSV_COLUMNS`].
pub fn write_csv<W: Write>(record: &RunRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    let cfg = &record.config;
    for p in &record.per_point {
        for m in &p.metrics {
            w.write_record([
                cfg.experiment.name().to_owned(),
                cfg.model.n().to_string(),
                p.m.to_string(),
                cfg.model.k().to_string(),
                cfg.model.alpha().to_string(),
                p.grid_name.clone(),
                p.grid_value.to_string(),
                m.name.clone(),
                m.estimate.to_string(),
                m.stderr.to_string(),
                m.replicates.to_string(),
                cfg.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// JSON has no infinities; non-finite reals are written as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
pub(crate) mod jsonf64 {
    use serde::de::{self, Deserializer};
    use serde::ser::Serializer;
    use serde::{Deserialize, Serialize};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn decode<E: de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::custom(format!("expected a number, got '{s}'"))),
            },
        }
    }

    fn text(x: f64) -> &'static str {
        if x.is_nan() {
            "nan"
        } else if x > 0.0 {
            "inf"
        } else {
            "-inf"
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(text(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        decode(Repr::deserialize(d)?)
    }

    /// A sequence of reals that may contain non-finite values.
    #[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
    #[serde(transparent)]
    pub struct Series(#[serde(with = "vec")] pub Vec<f64>);

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        struct Item(f64);

        impl Serialize for Item {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::serialize(&self.0, s)
            }
        }

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for &x in xs {
                seq.serialize_element(&Item(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(decode).collect()
        }
    }
}
