//! Pairwise dependence between ℓ-values of the same diagram.
//!
//! Each trial draws a fresh cloud, computes its diagram and keeps the
//! ℓ-values of `m` pairs chosen uniformly without replacement. Across `N`
//! trials the columns are compared by Pearson correlation and by distance
//! correlation, against a baseline of iid LGumbel rows.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::filtration::ComplexType;
use crate::pipeline::{diagram_with, TauPolicy};
use crate::rng;
use crate::samplers::ModelSpec;
use crate::universality::{l_values, lgumbel_sample, pi_values_finite};

/// Fresh draws tried after a diagram comes out smaller than `m`.
pub const MAX_RETRIES: u64 = 10;

/// `N × m` matrix of ℓ-values, one row per diagram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LVectorSample {
    pub rows: Vec<Vec<f64>>,
    pub m: usize,
}

impl LVectorSample {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::input("ℓ-vector rows differ in length"));
        }
        Ok(Self { rows, m })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

/// What each trial of [`collect_l_vectors`] computes.
#[derive(Clone, Debug)]
pub struct TrialSetup {
    pub model: ModelSpec,
    pub n_points: usize,
    pub complex_type: ComplexType,
    pub k: usize,
    pub tau: TauPolicy,
}

fn one_row(setup: &TrialSetup, m: usize, seed: u64, trial: u64) -> Result<Vec<f64>> {
    let mut last = 0;
    for attempt in 0..=MAX_RETRIES {
        let s = rng::derive_seed(seed, &[trial, attempt]);
        let cloud = setup.model.sample(setup.n_points, s)?;
        let dgm = diagram_with(&cloud, setup.complex_type, setup.k, setup.tau)?;
        let pi = pi_values_finite(&dgm, setup.complex_type)?;
        last = pi.values.len();
        if last < m.max(2) {
            continue;
        }
        let mut l = l_values(&pi)?.values;
        l.shuffle(&mut rng::stream(s, "dependence/permutation"));
        l.truncate(m);
        return Ok(l);
    }
    Err(Error::InsufficientData(format!(
        "trial {trial}: diagrams kept coming out with {last} < {m} finite pairs after {MAX_RETRIES} retries"
    )))
}

/// `trials` rows of `m` ℓ-values; trial `t`, attempt `a` uses the seed
/// derived from `(seed, t, a)`. Trials run in parallel.
pub fn collect_l_vectors(setup: &TrialSetup, trials: usize, m: usize, seed: u64) -> Result<LVectorSample> {
    if trials == 0 || m == 0 {
        return Err(Error::param("need at least one trial and one value per trial"));
    }
    let rows = (0..trials as u64).into_par_iter().map(|t| one_row(setup, m, seed, t)).collect::<Result<Vec<_>>>()?;
    LVectorSample::new(rows)
}

/// Baseline rows of iid LGumbel draws.
pub fn collect_lgumbel_vectors(trials: usize, m: usize, seed: u64) -> LVectorSample {
    let rows = (0..trials as u64)
        .map(|t| {
            let mut r = rng::stream(rng::derive_seed(seed, &[t]), "dependence/lgumbel");
            (0..m).map(|_| lgumbel_sample(&mut r)).collect()
        })
        .collect();
    LVectorSample { rows, m }
}

fn need_rows(s: &LVectorSample) -> Result<()> {
    if s.n() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 rows, got {}", s.n())));
    }
    Ok(())
}

/// Sample covariance with `1/(N−1)` normalization.
pub fn covariance_matrix(s: &LVectorSample) -> Result<Vec<Vec<f64>>> {
    need_rows(s)?;
    let n = s.n() as f64;
    let means: Vec<f64> = (0..s.m).map(|j| s.rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut cov = vec![vec![0.0; s.m]; s.m];
    for r in &s.rows {
        for i in 0..s.m {
            let di = r[i] - means[i];
            for j in i..s.m {
                cov[i][j] += di * (r[j] - means[j]);
            }
        }
    }
    for i in 0..s.m {
        for j in i..s.m {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }
    Ok(cov)
}

pub fn correlation_matrix(s: &LVectorSample) -> Result<Vec<Vec<f64>>> {
    let cov = covariance_matrix(s)?;
    if let Some(j) = (0..s.m).find(|&j| !(cov[j][j] > 0.0)) {
        return Err(Error::domain(format!("column {j} has zero variance; correlation undefined")));
    }
    Ok((0..s.m).map(|i| (0..s.m).map(|j| cov[i][j] / (cov[i][i] * cov[j][j]).sqrt()).collect()).collect())
}

/// Mean and maximum absolute value over the strict upper triangle.
pub fn off_diagonal_summary(mat: &[Vec<f64>]) -> (f64, f64) {
    let vals: Vec<f64> = (0..mat.len()).flat_map(|i| (i + 1..mat.len()).map(move |j| mat[i][j].abs())).collect();
    if vals.is_empty() {
        return (0.0, 0.0);
    }
    (vals.iter().sum::<f64>() / vals.len() as f64, vals.iter().copied().fold(0.0, f64::max))
}

/// `(mean |corr|, max |corr|)` over off-diagonal pairs.
pub fn correlation_summary(s: &LVectorSample) -> Result<(f64, f64)> {
    Ok(off_diagonal_summary(&correlation_matrix(s)?))
}

/// Row means and grand mean of the pairwise distance matrix of `x`.
fn centering(x: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let rows: Vec<f64> = x.iter().map(|a| x.iter().map(|b| (a - b).abs()).sum::<f64>() / n).collect();
    let grand = rows.iter().sum::<f64>() / n;
    (rows, grand)
}

fn dcov2_centered(x: &[f64], cx: &(Vec<f64>, f64), y: &[f64], cy: &(Vec<f64>, f64)) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    for k in 0..n {
        let mut row = 0.0;
        for l in 0..n {
            let a = (x[k] - x[l]).abs() - cx.0[k] - cx.0[l] + cx.1;
            let b = (y[k] - y[l]).abs() - cy.0[k] - cy.0[l] + cy.1;
            row += a * b;
        }
        total += row;
    }
    total / (n * n) as f64
}

/// Sample distance covariance (V-statistic): the square root of the mean
/// product of the doubly centred distance matrices, clamped at 0.
pub fn distance_covariance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::input("distance covariance needs two equal-length samples of size at least 2"));
    }
    Ok(dcov2_centered(x, &centering(x), y, &centering(y)).max(0.0).sqrt())
}

pub fn distance_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    let (cx, cy) = (centering(x), centering(y));
    let vx = dcov2_centered(x, &cx, x, &cx).max(0.0);
    let vy = dcov2_centered(y, &cy, y, &cy).max(0.0);
    let xy = dcov2_centered(x, &cx, y, &cy).max(0.0);
    if vx == 0.0 || vy == 0.0 {
        return Ok(0.0);
    }
    Ok((xy / (vx * vy).sqrt()).sqrt())
}

/// Distance variances on the diagonal, distance correlations off it.
pub fn dcov_matrix(s: &LVectorSample) -> Result<Vec<Vec<f64>>> {
    need_rows(s)?;
    let cols: Vec<Vec<f64>> = (0..s.m).map(|j| s.column(j)).collect();
    let cent: Vec<(Vec<f64>, f64)> = cols.par_iter().map(|c| centering(c)).collect();
    let var: Vec<f64> = (0..s.m).into_par_iter().map(|j| dcov2_centered(&cols[j], &cent[j], &cols[j], &cent[j]).max(0.0)).collect();
    let pairs: Vec<(usize, usize)> = (0..s.m).flat_map(|i| (i + 1..s.m).map(move |j| (i, j))).collect();
    let off: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let xy = dcov2_centered(&cols[i], &cent[i], &cols[j], &cent[j]).max(0.0);
            if var[i] == 0.0 || var[j] == 0.0 {
                0.0
            } else {
                (xy / (var[i] * var[j]).sqrt()).sqrt()
            }
        })
        .collect();
    let mut mat = vec![vec![0.0; s.m]; s.m];
    for j in 0..s.m {
        mat[j][j] = var[j].sqrt();
    }
    for (&(i, j), &v) in pairs.iter().zip(&off) {
        mat[i][j] = v;
        mat[j][i] = v;
    }
    Ok(mat)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DependenceSummary {
    pub mean_corr: f64,
    pub max_corr: f64,
    pub mean_dcorr: f64,
    pub max_dcorr: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
}

pub fn summarize(s: &LVectorSample) -> Result<DependenceSummary> {
    let (mean_corr, max_corr) = correlation_summary(s)?;
    let (mean_dcorr, max_dcorr) = off_diagonal_summary(&dcov_matrix(s)?);
    Ok(DependenceSummary { mean_corr, max_corr, mean_dcorr, max_dcorr, n: s.n(), m: s.m })
}

/// Square matrix as CSV without a header.
pub fn matrix_csv(mat: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in mat {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
