//! Reading and writing point-clouds, signals and meshes.

use std::fmt::Write as _;
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::samplers::TriangleMesh;

/// Model tag of ingested clouds.
pub const EXTERNAL_TAG: &str = "external";

/// Parses a rectangular numeric CSV, one point per row. With `header` the
/// first row is skipped.
pub fn parse_pointcloud_csv(text: &str, header: bool) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut coords = Vec::new();
    let mut dim = None;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match dim {
            None => dim = Some(record.len()),
            Some(d) if d != record.len() => {
                return Err(Error::Parse { line, msg: format!("expected {d} columns, found {}", record.len()) });
            }
            _ => {}
        }
        for cell in record.iter() {
            let x: f64 = cell.parse().map_err(|_| Error::Parse { line, msg: format!("'{cell}' is not a number") })?;
            if !x.is_finite() {
                return Err(Error::Parse { line, msg: format!("'{cell}' is not finite") });
            }
            coords.push(x);
        }
    }
    let Some(dim) = dim else {
        return Err(Error::input("point-cloud file has no data rows"));
    };
    PointCloud::from_flat(coords, dim, EXTERNAL_TAG, 0, None)
}

pub fn read_pointcloud_csv(path: impl AsRef<Path>, header: bool) -> Result<PointCloud> {
    parse_pointcloud_csv(&std::fs::read_to_string(path)?, header)
}

/// One point per line, with an optional `x0,x1,...` header.
pub fn pointcloud_csv(cloud: &PointCloud, header: bool) -> String {
    let mut out = String::new();
    if header {
        let names: Vec<String> = (0..cloud.ambient_dim()).map(|i| format!("x{i}")).collect();
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for p in cloud.points() {
        let cells: Vec<String> = p.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Numbers separated by whitespace or commas; `#` starts a comment.
pub fn parse_signal(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let x: f64 = tok
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("'{tok}' is not a finite number") })?;
            out.push(x);
        }
    }
    if out.is_empty() {
        return Err(Error::input("signal file has no samples"));
    }
    Ok(out)
}

pub fn read_signal(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_signal(&std::fs::read_to_string(path)?)
}

pub fn read_off(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    TriangleMesh::from_off(&std::fs::read_to_string(path)?)
}
