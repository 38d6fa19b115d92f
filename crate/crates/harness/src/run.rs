//! Running one experiment config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use unipers::dependence::{self, DependenceSummary, TrialSetup};
use unipers::inference::{self, TestReport, ThresholdTrace};
use unipers::io::pointcloud_csv;
use unipers::pipeline::diagram_with;
use unipers::universality::{
    self as uni, ecdf, kde, l_values, pi_values_finite, pimax_rate, qq_against_lgumbel, silverman_bandwidth, StatsReport,
};
use unipers::{PersistenceDiagram, PointCloud};

use crate::config::{Analysis, ExperimentConfig};
use crate::error::{HarnessError, HarnessResult};

pub const DIAGRAM_FILE: &str = "diagram.csv";
pub const LVALUES_FILE: &str = "lvalues.csv";
pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Per-degree results recorded in `report.json`.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub k: usize,
    pub tau: f64,
    pub n_pairs: usize,
    pub n_infinite: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<TestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub trace: ThresholdTrace,
    pub test: TestReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedReport {
    pub seed: u64,
    pub n_points: usize,
    pub degrees: Vec<DegreeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dependence: Option<DependenceSummary>,
    /// One scalar per requested analysis for the first listed degree.
    pub metrics: BTreeMap<&'static str, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PimaxRow {
    pub n: usize,
    pub seed: u64,
    pub pimax: f64,
    pub g: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub output: PathBuf,
    pub seeds: Vec<SeedReport>,
    pub pimax: Vec<PimaxRow>,
    pub wall_time_s: f64,
}

impl RunSummary {
    /// Values of one metric across seeds (or the pooled π_max metric).
    pub fn metric(&self, analysis: Analysis) -> Vec<f64> {
        if analysis == Analysis::PimaxScaling {
            return pimax_metric(&self.pimax).into_iter().collect();
        }
        self.seeds.iter().filter_map(|s| s.metrics.get(analysis.name()).copied()).collect()
    }
}

/// Name of the scalar each analysis contributes to sweep aggregates.
pub fn metric_name(a: Analysis) -> &'static str {
    match a {
        Analysis::PiCdf => "max_pi",
        Analysis::LCdf => "n_finite",
        Analysis::Kde => "bandwidth",
        Analysis::Qq => "max_qq_gap",
        Analysis::Ks => "ks",
        Analysis::B => "B",
        Analysis::Test => "n_significant",
        Analysis::ThresholdSearch => "n_significant_after_search",
        Analysis::Dependence => "mean_corr",
        Analysis::PimaxScaling => "median_pimax_over_g_at_largest_n",
    }
}

fn pimax_metric(rows: &[PimaxRow]) -> Option<f64> {
    let largest = rows.iter().map(|r| r.n).max()?;
    let mut ratios: Vec<f64> = rows.iter().filter(|r| r.n == largest).map(|r| r.pimax / r.g).collect();
    ratios.sort_by(f64::total_cmp);
    Some(ratios[ratios.len() / 2])
}

fn write(dir: &Path, name: &str, contents: &str) -> HarnessResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| HarnessError::io(&path, e))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn stage<T>(stage: &'static str, seed: u64, r: HarnessResult<T>) -> HarnessResult<T> {
    r.map_err(|e| HarnessError::Stage { stage, seed, source: Box::new(e) })
}

fn diagrams_csv(dgms: &[PersistenceDiagram]) -> String {
    let mut out = String::from("k,birth,death\n");
    for d in dgms {
        let csv = d.to_csv();
        out.push_str(csv.split_once('\n').map_or("", |(_, rows)| rows));
    }
    out
}

/// Runs `config`, writing into its output directory. Seeds run in parallel
/// on the current rayon pool. On failure nothing is left behind.
pub fn run_experiment(config: &ExperimentConfig) -> HarnessResult<RunSummary> {
    config.validate()?;
    let start = Instant::now();
    let out = config.output.clone();
    let staging = prepare_output(&out)?;
    let result = run_into(config, &staging, start);
    match result {
        Ok(mut summary) => {
            finish_output(&staging, &out)?;
            summary.output = out;
            Ok(summary)
        }
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

/// Runs are written to a staging directory next to the target and moved
/// into place at the end. An existing target is only replaced when it
/// holds a previous run.
fn prepare_output(out: &Path) -> HarnessResult<PathBuf> {
    if out.exists() {
        let empty = std::fs::read_dir(out).map_err(|e| HarnessError::io(out, e))?.next().is_none();
        if !empty && !out.join(MANIFEST_FILE).exists() {
            return Err(HarnessError::Config(format!(
                "output directory {} exists and does not hold a previous run",
                out.display()
            )));
        }
    }
    let name = out.file_name().map_or_else(|| "run".into(), |n| n.to_string_lossy().into_owned());
    let staging = out.with_file_name(format!(".{name}.partial"));
    let _ = std::fs::remove_dir_all(&staging);
    std::fs::create_dir_all(&staging).map_err(|e| HarnessError::io(&staging, e))?;
    Ok(staging)
}

fn finish_output(staging: &Path, out: &Path) -> HarnessResult<()> {
    if out.exists() {
        std::fs::remove_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    }
    std::fs::rename(staging, out).map_err(|e| HarnessError::io(out, e))
}

fn run_into(config: &ExperimentConfig, dir: &Path, start: Instant) -> HarnessResult<RunSummary> {
    let seeds = config.seeds.expand();
    let nested = seeds.len() > 1;
    let reports: Vec<SeedReport> = seeds
        .par_iter()
        .map(|&seed| {
            let seed_dir = if nested { dir.join(format!("seed-{seed}")) } else { dir.to_path_buf() };
            std::fs::create_dir_all(&seed_dir).map_err(|e| HarnessError::io(&seed_dir, e))?;
            run_seed(config, seed, &seed_dir)
        })
        .collect::<HarnessResult<_>>()?;

    let mut pimax = Vec::new();
    if let Some(p) = config.pimax.as_ref().filter(|_| config.analyses.contains(&Analysis::PimaxScaling)) {
        let k = config.degrees[0];
        let cells: Vec<(usize, u64)> = p.sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
        pimax = cells
            .par_iter()
            .map(|&(n, seed)| {
                let r: HarnessResult<PimaxRow> = (|| {
                    let cloud = config.model.sample(n, seed)?;
                    let dgm = diagram_with(&cloud, config.complex, k, config.tau.policy())?;
                    let pi = pi_values_finite(&dgm, config.complex)?;
                    let pimax = pi.max().ok_or_else(|| unipers::Error::InsufficientData("empty diagram".into()))?;
                    Ok(PimaxRow { n, seed, pimax, g: pimax_rate(n, k) })
                })();
                stage("pimax_scaling", seed, r)
            })
            .collect::<HarnessResult<_>>()?;
        let mut csv = String::from("n,seed,pimax,g,ratio\n");
        for r in &pimax {
            let _ = writeln!(csv, "{},{},{},{},{}", r.n, r.seed, r.pimax, r.g, r.pimax / r.g);
        }
        write(dir, "pimax.csv", &csv)?;
    }

    let wall_time_s = start.elapsed().as_secs_f64();
    write(dir, MANIFEST_FILE, &json(&manifest(config, &seeds, wall_time_s, dir)?))?;
    Ok(RunSummary { output: dir.to_path_buf(), seeds: reports, pimax, wall_time_s })
}

/// SHA-256 of the config's canonical JSON form.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn manifest(config: &ExperimentConfig, seeds: &[u64], wall_time_s: f64, dir: &Path) -> HarnessResult<serde_json::Value> {
    let mut files = Vec::new();
    collect_files(dir, dir, &mut files)?;
    files.sort();
    Ok(serde_json::json!({
        "config": config,
        "config_hash": config_hash(config),
        "seeds": seeds,
        "seed_derivation": "trial seeds are rng::derive_seed(seed, [trial, attempt])",
        "versions": { "unipers": env!("CARGO_PKG_VERSION") },
        "wall_time_s": wall_time_s,
        "files": files,
    }))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> HarnessResult<()> {
    for entry in std::fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))? {
        let path = entry.map_err(|e| HarnessError::io(dir, e))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if let Ok(rel) = path.strip_prefix(root) {
            out.push(rel.to_string_lossy().replace('\\', "/"));
        }
    }
    Ok(())
}

fn run_seed(config: &ExperimentConfig, seed: u64, dir: &Path) -> HarnessResult<SeedReport> {
    let has = |a: Analysis| config.analyses.contains(&a);
    let cloud: PointCloud = stage("sample", seed, config.model.sample(config.n, seed).map_err(Into::into))?;
    write(dir, "points.csv", &pointcloud_csv(&cloud, false))?;

    let mut dgms = Vec::new();
    for &k in &config.degrees {
        dgms.push(stage("persist", seed, diagram_with(&cloud, config.complex, k, config.tau.policy()).map_err(Into::into))?);
    }
    write(dir, DIAGRAM_FILE, &diagrams_csv(&dgms))?;

    let mut metrics = BTreeMap::new();
    let mut degrees = Vec::new();
    let (mut lcsv, mut picdf, mut lcdf, mut kdecsv, mut qqcsv) = (
        String::from("k,birth,death,pi,l\n"),
        String::from("k,x,F\n"),
        String::from("k,x,F\n"),
        String::from("k,x,f\n"),
        String::from("k,theoretical,empirical\n"),
    );
    for (i, dgm) in dgms.iter().enumerate() {
        let k = dgm.k;
        let primary = i == 0;
        let mut put = |a: Analysis, v: f64| {
            if primary && has(a) {
                metrics.insert(a.name(), v);
            }
        };
        let pi = stage("analyze", seed, pi_values_finite(dgm, config.complex).map_err(Into::into))?;
        let needs_l = [Analysis::LCdf, Analysis::Kde, Analysis::Qq, Analysis::Ks, Analysis::B, Analysis::Test]
            .iter()
            .any(|&a| has(a));
        let l = if needs_l { Some(stage("analyze", seed, l_values(&pi).map_err(Into::into))?) } else { None };

        if let Some(m) = pi.max() {
            put(Analysis::PiCdf, m);
        }
        if has(Analysis::PiCdf) {
            for (x, f) in ecdf(&pi.values).steps() {
                let _ = writeln!(picdf, "{k},{x},{f}");
            }
        }
        let mut stats = None;
        if let Some(l) = &l {
            for (((b, d), p), lv) in dgm.finite().zip(&pi.values).zip(&l.values) {
                let _ = writeln!(lcsv, "{k},{b},{d},{p},{lv}");
            }
            put(Analysis::LCdf, l.values.len() as f64);
            if has(Analysis::LCdf) {
                for (x, f) in ecdf(&l.values).steps() {
                    let _ = writeln!(lcdf, "{k},{x},{f}");
                }
            }
            if has(Analysis::Kde) {
                let curve = stage("analyze", seed, kde(&l.values, config.kde.bandwidth, config.kde.points).map_err(Into::into))?;
                put(Analysis::Kde, config.kde.bandwidth.unwrap_or_else(|| silverman_bandwidth(&l.values)));
                for (x, f) in curve {
                    let _ = writeln!(kdecsv, "{k},{x},{f}");
                }
            }
            if has(Analysis::Qq) {
                let qq = qq_against_lgumbel(&l.values);
                put(Analysis::Qq, qq.iter().map(|(t, e)| (t - e).abs()).fold(0.0, f64::max));
                for (t, e) in qq {
                    let _ = writeln!(qqcsv, "{k},{t},{e}");
                }
            }
            let report = uni::stats_report(l);
            put(Analysis::Ks, report.ks);
            put(Analysis::B, report.b);
            stats = Some(report);
        }
        let test = if has(Analysis::Test) {
            let r = stage("test", seed, inference::test_diagram(dgm, config.complex, config.test.alpha).map_err(Into::into))?;
            put(Analysis::Test, r.n_significant() as f64);
            Some(r)
        } else {
            None
        };
        let threshold = match (&config.threshold, has(Analysis::ThresholdSearch)) {
            (Some(t), true) => {
                let (d, trace) = stage(
                    "threshold_search",
                    seed,
                    inference::threshold_search(&cloud, config.complex, k, config.test.alpha, t.tau0, t.policy)
                        .map_err(Into::into),
                )?;
                let test = stage("threshold_search", seed, inference::test_diagram(&d, config.complex, config.test.alpha).map_err(Into::into))?;
                put(Analysis::ThresholdSearch, test.n_significant() as f64);
                Some(ThresholdReport { trace, test })
            }
            _ => None,
        };
        degrees.push(DegreeReport { k, tau: dgm.tau, n_pairs: dgm.len(), n_infinite: dgm.n_infinite(), stats, test, threshold });
    }
    if has(Analysis::PiCdf) {
        write(dir, "pi_ecdf.csv", &picdf)?;
    }
    if has(Analysis::LCdf) {
        write(dir, "l_ecdf.csv", &lcdf)?;
    }
    if has(Analysis::Kde) {
        write(dir, "l_kde.csv", &kdecsv)?;
    }
    if has(Analysis::Qq) {
        write(dir, "qq.csv", &qqcsv)?;
    }
    if dgms.iter().any(|d| d.len() > 0) {
        write(dir, LVALUES_FILE, &lcsv)?;
    }

    let dependence = match (&config.dependence, has(Analysis::Dependence)) {
        (Some(d), true) => {
            let sample = if d.baseline {
                dependence::collect_lgumbel_vectors(d.trials, d.m, seed)
            } else {
                let setup = TrialSetup {
                    model: config.model.clone(),
                    n_points: config.n,
                    complex_type: config.complex,
                    k: config.degrees[0],
                    tau: config.tau.policy(),
                };
                stage("dependence", seed, dependence::collect_l_vectors(&setup, d.trials, d.m, seed).map_err(Into::into))?
            };
            let corr = stage("dependence", seed, dependence::correlation_matrix(&sample).map_err(Into::into))?;
            let dcor = stage("dependence", seed, dependence::dcov_matrix(&sample).map_err(Into::into))?;
            write(dir, "corr.csv", &dependence::matrix_csv(&corr))?;
            write(dir, "dcor.csv", &dependence::matrix_csv(&dcor))?;
            let (mean_corr, max_corr) = dependence::off_diagonal_summary(&corr);
            let (mean_dcorr, max_dcorr) = dependence::off_diagonal_summary(&dcor);
            let summary = DependenceSummary { mean_corr, max_corr, mean_dcorr, max_dcorr, n: sample.n(), m: sample.m };
            write(dir, "dependence.json", &json(&summary))?;
            metrics.insert(Analysis::Dependence.name(), mean_corr);
            Some(summary)
        }
        _ => None,
    };

    let report = SeedReport { seed, n_points: cloud.len(), degrees, dependence, metrics };
    write(dir, REPORT_FILE, &json(&report))?;
    Ok(report)
}
