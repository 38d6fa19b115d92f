//! Cartesian parameter sweeps.
//!
//! Each `[[sweep]]` axis names a dotted key (`model.r_in`, `n`, `test.alpha`)
//! and the values it takes. Every combination is a cell; every (cell, seed)
//! is an independent run written to `cell-{i}/seed-{s}`. Failed runs are
//! counted rather than aborting the sweep.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Seeds};
use crate::error::{HarnessError, HarnessResult};
use crate::run::{config_hash, metric_name, run_experiment, MANIFEST_FILE};

pub const AGGREGATE_FILE: &str = "aggregate.csv";

#[derive(Clone, Debug, Serialize)]
pub struct SweepCell {
    pub index: usize,
    /// `key=value` for each axis, in axis order.
    pub params: Vec<(String, String)>,
    pub rows: Vec<AggregateRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AggregateRow {
    pub analysis: &'static str,
    pub metric: &'static str,
    pub mean: f64,
    pub sd: f64,
    pub n_ok: usize,
    pub n_failed: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub output: PathBuf,
    pub cells: Vec<SweepCell>,
    pub wall_time_s: f64,
}

/// Sets a dotted key inside a TOML table, creating intermediate tables.
fn set_dotted(root: &mut toml::Value, key: &str, value: toml::Value) -> HarnessResult<()> {
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| HarnessError::Config(format!("sweep key '{key}' passes through a non-table")))?;
        if i + 1 == parts.len() {
            table.insert((*part).to_string(), value);
            return Ok(());
        }
        node = table.entry((*part).to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
    }
    Err(HarnessError::Config("empty sweep key".into()))
}

/// Expands the sweep grid into one config per cell (seeds untouched).
pub fn expand_grid(base: &ExperimentConfig) -> HarnessResult<Vec<(Vec<(String, String)>, ExperimentConfig)>> {
    if base.sweep.is_empty() || base.sweep.iter().any(|a| a.values.is_empty()) {
        return Err(HarnessError::Config("sweep grid is empty".into()));
    }
    let mut template = base.clone();
    template.sweep.clear();
    let root = toml::Value::try_from(&template).map_err(|e| HarnessError::Config(e.to_string()))?;

    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for axis in &base.sweep {
        combos = combos
            .into_iter()
            .flat_map(|c| (0..axis.values.len()).map(move |j| [c.clone(), vec![j]].concat()))
            .collect();
    }
    combos
        .into_iter()
        .enumerate()
        .map(|(i, combo)| {
            let mut value = root.clone();
            let mut params = Vec::new();
            for (axis, &j) in base.sweep.iter().zip(&combo) {
                let v = axis.values[j].clone();
                params.push((axis.key.clone(), v.to_string()));
                set_dotted(&mut value, &axis.key, v)?;
            }
            let mut cfg: ExperimentConfig = value
                .try_into()
                .map_err(|e: toml::de::Error| HarnessError::Config(format!("cell {i}: {e}")))?;
            cfg.output = base.output.join(format!("cell-{i}"));
            cfg.validate().map_err(|e| HarnessError::Config(format!("cell {i}: {e}")))?;
            Ok((params, cfg))
        })
        .collect()
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}

fn prepare(out: &Path) -> HarnessResult<()> {
    if out.exists() {
        let empty = std::fs::read_dir(out).map_err(|e| HarnessError::io(out, e))?.next().is_none();
        if !empty && !out.join(MANIFEST_FILE).exists() {
            return Err(HarnessError::Config(format!(
                "output directory {} exists and does not hold a previous run",
                out.display()
            )));
        }
        std::fs::remove_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    }
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))
}

/// Runs every (cell, seed) pair and writes `aggregate.csv` with one row per
/// cell and analysis. Metrics come from the first listed degree.
pub fn run_sweep(base: &ExperimentConfig) -> HarnessResult<SweepSummary> {
    let start = Instant::now();
    let grid = expand_grid(base)?;
    prepare(&base.output)?;
    let seeds = base.seeds.expand();

    let jobs: Vec<(usize, u64)> = (0..grid.len()).flat_map(|c| seeds.iter().map(move |&s| (c, s))).collect();
    let results: Vec<HarnessResult<crate::run::RunSummary>> = jobs
        .par_iter()
        .map(|&(c, seed)| {
            let mut cfg = grid[c].1.clone();
            cfg.seeds = Seeds::One(seed);
            cfg.output = cfg.output.join(format!("seed-{seed}"));
            run_experiment(&cfg)
        })
        .collect();

    let mut cells = Vec::with_capacity(grid.len());
    for (c, (params, cfg)) in grid.iter().enumerate() {
        let runs: Vec<_> = jobs.iter().zip(&results).filter(|((cc, _), _)| *cc == c).map(|(_, r)| r).collect();
        let first_error = runs.iter().find_map(|r| r.as_ref().err().map(ToString::to_string));
        let rows = cfg
            .analyses
            .iter()
            .map(|&a| {
                let values: Vec<f64> = runs.iter().filter_map(|r| r.as_ref().ok()).flat_map(|s| s.metric(a)).collect();
                let n_failed = runs.iter().filter(|r| r.is_err()).count();
                let (mean, sd) = mean_sd(&values);
                AggregateRow {
                    analysis: a.name(),
                    metric: metric_name(a),
                    mean,
                    sd,
                    n_ok: runs.len() - n_failed,
                    n_failed,
                    error: first_error.clone(),
                }
            })
            .collect();
        cells.push(SweepCell { index: c, params: params.clone(), rows });
    }

    let out = &base.output;
    let agg = aggregate_csv(&cells);
    std::fs::write(out.join(AGGREGATE_FILE), agg).map_err(|e| HarnessError::io(out.join(AGGREGATE_FILE), e))?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let manifest = serde_json::json!({
        "config": base,
        "config_hash": config_hash(base),
        "seeds": seeds,
        "cells": cells.iter().map(|c| serde_json::json!({ "index": c.index, "params": c.params })).collect::<Vec<_>>(),
        "versions": { "unipers": env!("CARGO_PKG_VERSION") },
        "wall_time_s": wall_time_s,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(out.join(MANIFEST_FILE), text + "\n").map_err(|e| HarnessError::io(out.join(MANIFEST_FILE), e))?;
    Ok(SweepSummary { output: out.clone(), cells, wall_time_s })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn aggregate_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("cell,params,analysis,metric,mean,sd,n_ok,n_failed,error\n");
    for c in cells {
        let params = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        for r in &c.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                c.index,
                csv_field(&params),
                r.analysis,
                r.metric,
                r.mean,
                r.sd,
                r.n_ok,
                r.n_failed,
                csv_field(r.error.as_deref().unwrap_or(""))
            );
        }
    }
    out
}
