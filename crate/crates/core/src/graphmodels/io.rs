//! CSV exchange formats: edge lists (`u,v`) and degree vectors (`degree`).

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub fn write_edges_csv<W: Write>(out: W, edges: &[(u64, u64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "v"])?;
    for &(u, v) in edges {
        w.write_record([u.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_edges_csv<R: Read>(input: R) -> Result<Vec<(u64, u64)>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &["u", "v"])?;
    let mut edges = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let u = parse_field(&rec, 0)?;
        let v = parse_field(&rec, 1)?;
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn write_degrees_csv<W: Write>(out: W, degrees: &[u32]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["degree"])?;
    for d in degrees {
        w.write_record([d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_degrees_csv<R: Read>(input: R) -> Result<Vec<u32>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &["degree"])?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            parse_field(&rec, 0)
        })
        .collect()
}

fn check_header(h: &csv::StringRecord, want: &[&str]) -> Result<()> {
    let got: Vec<&str> = h.iter().map(str::trim).collect();
    if got != want {
        return Err(Error::Parse(format!(
            "expected CSV header {:?}, found {:?}",
            want.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {i} in {rec:?}")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not an integer: {raw:?}")))
}
