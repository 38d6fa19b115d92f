use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use unipers::inference::{self, ThresholdPolicy};
use unipers::io::{self, EXTERNAL_TAG};
use unipers::pipeline::diagram_with;
use unipers::samplers::{delay_embed, sample_mesh, MeshWeighting, ModelSpec};
use unipers::universality::{l_values, pi_values_finite, stats_report};
use unipers::{dependence, ComplexType, PersistenceDiagram, PointCloud};
use unipers_harness::config::{ExperimentConfig, TauName, TauSetting};
use unipers_harness::{run_experiment, run_sweep, HarnessError, HarnessResult};

#[derive(Parser)]
#[command(name = "unipers", version, about = "Universal persistence statistics for random point clouds")]
struct Cli {
    /// Top-level seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (single-result commands) or directory (run, sweep).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a point cloud from a model.
    Sample {
        /// Inline model, e.g. `sampler=torus,r1=2,r2=1`.
        #[arg(long)]
        model: String,
        #[arg(short, long)]
        n: usize,
    },
    /// Persistence diagram of a point-cloud CSV.
    Persist {
        #[command(flatten)]
        input: CloudInput,
        #[command(flatten)]
        complex: ComplexArgs,
    },
    /// π- and ℓ-values and the LGumbel fit of a diagram CSV.
    Analyze {
        #[command(flatten)]
        diagram: DiagramInput,
    },
    /// Per-cycle significance test of a diagram CSV.
    Test {
        #[command(flatten)]
        diagram: DiagramInput,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Raise the threshold until infinite cycles are resolved, then test.
    Threshold {
        #[command(flatten)]
        input: CloudInput,
        #[arg(long, value_enum, default_value_t = ComplexArg::Rips)]
        complex: ComplexArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        tau0: f64,
        #[arg(long, default_value = "earliest")]
        policy: ThresholdPolicy,
    },
    /// Correlation and distance correlation of ℓ-vectors across trials.
    Dependence {
        #[arg(long)]
        model: String,
        #[arg(short, long)]
        n: usize,
        #[command(flatten)]
        complex: ComplexArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 25)]
        m: usize,
    },
    /// Run every cell of a config's `[[sweep]]` grid.
    Sweep { config: PathBuf },
    /// Run one experiment config (TOML, or a manifest.json to reproduce a run).
    Run { config: PathBuf },
    /// Import an external point cloud, signal or mesh as a point-cloud CSV.
    Ingest {
        #[command(subcommand)]
        source: IngestSource,
    },
}

#[derive(Subcommand)]
enum IngestSource {
    /// Numeric CSV, one point per row.
    Csv {
        path: PathBuf,
        #[arg(long)]
        header: bool,
    },
    /// Plain-text signal, delay-embedded.
    Signal {
        path: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        delta: usize,
        #[arg(long, default_value_t = 1)]
        lag: usize,
    },
    /// ASCII OFF triangle mesh, sampled by triangle weighting.
    Mesh {
        path: PathBuf,
        #[arg(short, long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = WeightingArg::Area)]
        weighting: WeightingArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Area,
    InverseArea,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexArg {
    Rips,
    Alpha,
    Cech,
}

impl From<ComplexArg> for ComplexType {
    fn from(c: ComplexArg) -> Self {
        match c {
            ComplexArg::Rips => ComplexType::Rips,
            ComplexArg::Alpha => ComplexType::Alpha,
            ComplexArg::Cech => ComplexType::Cech,
        }
    }
}

#[derive(Args)]
struct CloudInput {
    /// Point-cloud CSV; omit to sample from --model.
    #[arg(long, conflicts_with = "model")]
    input: Option<PathBuf>,
    #[arg(long)]
    header: bool,
    #[arg(long, requires = "n")]
    model: Option<String>,
    #[arg(short, long)]
    n: Option<usize>,
}

#[derive(Args)]
struct ComplexArgs {
    #[arg(long, value_enum, default_value_t = ComplexArg::Rips)]
    complex: ComplexArg,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// A radius, `auto` or `enclosing`.
    #[arg(long, default_value = "auto")]
    tau: String,
}

#[derive(Args)]
struct DiagramInput {
    /// Diagram CSV with header `k,birth,death`.
    #[arg(long)]
    diagram: PathBuf,
    #[arg(long, value_enum, default_value_t = ComplexArg::Rips)]
    complex: ComplexArg,
}

fn parse_tau(s: &str) -> HarnessResult<TauSetting> {
    match s {
        "auto" => Ok(TauSetting::Named(TauName::Auto)),
        "enclosing" => Ok(TauSetting::Named(TauName::Enclosing)),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0)
            .map(TauSetting::Radius)
            .ok_or_else(|| HarnessError::Config(format!("tau must be a positive number, 'auto' or 'enclosing', got '{s}'"))),
    }
}

/// Parses `sampler=box,dim=2` into a model. Values that look numeric or
/// boolean stay typed; everything else is a string.
fn parse_model(spec: &str) -> HarnessResult<ModelSpec> {
    let mut table = toml::Table::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, raw) = part
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("model entry '{part}' is not key=value")))?;
        let raw = raw.trim();
        let value = if let Ok(i) = raw.parse::<i64>() {
            toml::Value::Integer(i)
        } else if let Ok(f) = raw.parse::<f64>() {
            toml::Value::Float(f)
        } else if let Ok(b) = raw.parse::<bool>() {
            toml::Value::Boolean(b)
        } else {
            toml::Value::String(raw.to_string())
        };
        table.insert(key.trim().to_string(), value);
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| HarnessError::Config(format!("model: {e}")))
}

fn load_cloud(input: &CloudInput, seed: u64) -> HarnessResult<PointCloud> {
    match (&input.input, &input.model, input.n) {
        (Some(path), _, _) => Ok(io::read_pointcloud_csv(path, input.header)?),
        (None, Some(model), Some(n)) => Ok(parse_model(model)?.sample(n, seed)?),
        _ => Err(HarnessError::Config("give --input, or --model with -n".into())),
    }
}

fn load_diagram(input: &DiagramInput) -> HarnessResult<PersistenceDiagram> {
    let text = std::fs::read_to_string(&input.diagram).map_err(|e| HarnessError::io(&input.diagram, e))?;
    Ok(PersistenceDiagram::from_csv(&text, f64::INFINITY, 0)?)
}

fn emit(out: Option<&Path>, text: &str) -> HarnessResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| HarnessError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn execute(cli: &Cli) -> HarnessResult<()> {
    let out = cli.out.as_deref();
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Sample { model, n } => {
            let cloud = parse_model(model)?.sample(*n, cli.seed)?;
            emit(out, &io::pointcloud_csv(&cloud, false))
        }
        Command::Persist { input, complex } => {
            let cloud = load_cloud(input, cli.seed)?;
            let policy = parse_tau(&complex.tau)?.policy();
            let dgm = diagram_with(&cloud, complex.complex.into(), complex.k, policy)?;
            if json {
                let pairs: Vec<(f64, Option<f64>)> = dgm.pairs.iter().map(|&(b, d)| (b, d.is_finite().then_some(d))).collect();
                emit(out, &to_json(&serde_json::json!({ "k": dgm.k, "tau": dgm.tau, "n_points": dgm.n_points, "pairs": pairs })))
            } else {
                emit(out, &dgm.to_csv())
            }
        }
        Command::Analyze { diagram } => {
            let dgm = load_diagram(diagram)?;
            let pi = pi_values_finite(&dgm, diagram.complex.into())?;
            let l = l_values(&pi)?;
            if json {
                emit(out, &to_json(&serde_json::json!({ "report": stats_report(&l), "pi": pi.values, "l": l.values })))
            } else {
                let mut csv = String::from("k,birth,death,pi,l\n");
                for (((b, d), p), lv) in dgm.finite().zip(&pi.values).zip(&l.values) {
                    csv.push_str(&format!("{},{b},{d},{p},{lv}\n", dgm.k));
                }
                emit(out, &csv)
            }
        }
        Command::Test { diagram, alpha } => {
            let dgm = load_diagram(diagram)?;
            let report = inference::test_diagram(&dgm, diagram.complex.into(), *alpha)?;
            if json {
                emit(out, &to_json(&report))
            } else {
                emit(out, &cycles_csv(&report))
            }
        }
        Command::Threshold { input, complex, k, alpha, tau0, policy } => {
            let cloud = load_cloud(input, cli.seed)?;
            let ct: ComplexType = (*complex).into();
            let (dgm, trace) = inference::threshold_search(&cloud, ct, *k, *alpha, *tau0, *policy)?;
            let report = inference::test_diagram(&dgm, ct, *alpha)?;
            if json {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                v["trace"] = serde_json::to_value(&trace.iterations).expect("trace serializes");
                v["final_tau"] = trace.final_tau.into();
                emit(out, &to_json(&v))
            } else {
                emit(out, &cycles_csv(&report))
            }
        }
        Command::Dependence { model, n, complex, trials, m } => {
            let setup = dependence::TrialSetup {
                model: parse_model(model)?,
                n_points: *n,
                complex_type: complex.complex.into(),
                k: complex.k,
                tau: parse_tau(&complex.tau)?.policy(),
            };
            let sample = dependence::collect_l_vectors(&setup, *trials, *m, cli.seed)?;
            if json {
                emit(out, &to_json(&dependence::summarize(&sample)?))
            } else {
                emit(out, &dependence::matrix_csv(&dependence::correlation_matrix(&sample)?))
            }
        }
        Command::Run { config } | Command::Sweep { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(dir) = out {
                cfg.output = dir.to_path_buf();
            }
            if matches!(cli.command, Command::Run { .. }) {
                let summary = run_experiment(&cfg)?;
                eprintln!("wrote {} ({} seeds, {:.1}s)", summary.output.display(), summary.seeds.len(), summary.wall_time_s);
            } else {
                let summary = run_sweep(&cfg)?;
                eprintln!("wrote {} ({} cells, {:.1}s)", summary.output.display(), summary.cells.len(), summary.wall_time_s);
            }
            Ok(())
        }
        Command::Ingest { source } => {
            let cloud = match source {
                IngestSource::Csv { path, header } => io::read_pointcloud_csv(path, *header)?,
                IngestSource::Signal { path, dim, delta, lag } => {
                    let signal = io::read_signal(path)?;
                    let mut c = delay_embed(&signal, *dim, *delta, *lag)?;
                    c.model_tag = EXTERNAL_TAG.to_string();
                    c
                }
                IngestSource::Mesh { path, n, weighting } => {
                    let mesh = io::read_off(path)?;
                    let w = match weighting {
                        WeightingArg::Area => MeshWeighting::AreaProportional,
                        WeightingArg::InverseArea => MeshWeighting::InverseArea,
                    };
                    sample_mesh(&mesh, w, *n, cli.seed)?
                }
            };
            emit(out, &io::pointcloud_csv(&cloud, false))
        }
    }
}

fn cycles_csv(report: &inference::TestReport) -> String {
    let mut s = String::from("birth,death,pi,l,p,p_adjusted,significant\n");
    for c in &report.cycles {
        let death = if c.death.is_finite() { c.death.to_string() } else { "inf".into() };
        s.push_str(&format!("{},{death},{},{},{},{},{}\n", c.birth, c.pi, c.l, c.p_value, c.p_adjusted, c.significant));
    }
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
