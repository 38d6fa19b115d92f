//! Experiment configuration.
//!
//! Configs are TOML with every table closed to unknown keys, so a typo is an
//! error rather than a silently ignored setting:
//!
//! ```toml
//! n = 1000
//! complex = "rips"
//! degrees = [1]
//! tau = "auto"            # "auto", "enclosing" or a positive number
//! seeds = { start = 0, count = 10 }   # or `seeds = 7` or `seeds = [1, 5]`
//! analyses = ["l_cdf", "ks", "B", "test"]
//! output = "out/box"
//!
//! [model]
//! sampler = "box"
//! dim = 2
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unipers::inference::ThresholdPolicy;
use unipers::pipeline::TauPolicy;
use unipers::samplers::ModelSpec;
use unipers::ComplexType;

use crate::error::{HarnessError, HarnessResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    PiCdf,
    LCdf,
    Kde,
    Qq,
    Ks,
    #[serde(rename = "B")]
    B,
    Test,
    ThresholdSearch,
    Dependence,
    PimaxScaling,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::PiCdf => "pi_cdf",
            Analysis::LCdf => "l_cdf",
            Analysis::Kde => "kde",
            Analysis::Qq => "qq",
            Analysis::Ks => "ks",
            Analysis::B => "B",
            Analysis::Test => "test",
            Analysis::ThresholdSearch => "threshold_search",
            Analysis::Dependence => "dependence",
            Analysis::PimaxScaling => "pimax_scaling",
        }
    }
}

/// `"auto"`, `"enclosing"` or a number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSetting {
    Radius(f64),
    Named(TauName),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauName {
    Auto,
    Enclosing,
}

impl Default for TauSetting {
    fn default() -> Self {
        TauSetting::Named(TauName::Auto)
    }
}

impl TauSetting {
    pub fn policy(self) -> TauPolicy {
        match self {
            TauSetting::Radius(r) => TauPolicy::Fixed(r),
            TauSetting::Named(TauName::Auto) => TauPolicy::Auto,
            TauSetting::Named(TauName::Enclosing) => TauPolicy::Enclosing,
        }
    }
}

/// A single seed, an explicit list, or `{ start, count }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    One(u64),
    List(Vec<u64>),
    Range(SeedRange),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub start: u64,
    pub count: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::One(0)
    }
}

impl Seeds {
    pub fn expand(&self) -> Vec<u64> {
        match self {
            Seeds::One(s) => vec![*s],
            Seeds::List(v) => v.clone(),
            Seeds::Range(r) => (r.start..r.start + r.count).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSettings {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl Default for TestSettings {
    fn default() -> Self {
        Self { alpha: default_alpha() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSettings {
    pub tau0: f64,
    #[serde(default)]
    pub policy: ThresholdPolicy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependenceSettings {
    pub trials: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    /// Replace diagrams by iid LGumbel draws.
    #[serde(default)]
    pub baseline: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PimaxSettings {
    pub sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KdeSettings {
    /// Silverman's rule when absent.
    #[serde(default)]
    pub bandwidth: Option<f64>,
    #[serde(default = "default_kde_points")]
    pub points: usize,
}

impl Default for KdeSettings {
    fn default() -> Self {
        Self { bandwidth: None, points: default_kde_points() }
    }
}

/// One sweep axis: a dotted key into the config and the values it takes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<toml::Value>,
}

fn default_alpha() -> f64 {
    0.05
}
fn default_m() -> usize {
    25
}
fn default_kde_points() -> usize {
    512
}
fn default_degrees() -> Vec<usize> {
    vec![1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub complex: ComplexType,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub tau: TauSetting,
    pub n: usize,
    #[serde(default)]
    pub seeds: Seeds,
    pub analyses: Vec<Analysis>,
    pub output: PathBuf,
    #[serde(default)]
    pub test: TestSettings,
    #[serde(default)]
    pub kde: KdeSettings,
    #[serde(default)]
    pub threshold: Option<ThresholdSettings>,
    #[serde(default)]
    pub dependence: Option<DependenceSettings>,
    #[serde(default)]
    pub pimax: Option<PimaxSettings>,
    /// Grid for `sweep`; ignored by single runs.
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> HarnessResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            return Self::from_manifest(&text);
        }
        Self::from_toml(&text)
    }

    /// The config recorded in a run manifest.
    pub fn from_manifest(text: &str) -> HarnessResult<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let config = value.get("config").cloned().ok_or_else(|| HarnessError::Config("manifest has no config".into()))?;
        let cfg: Self = serde_json::from_value(config).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> HarnessResult<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return bad("degrees must be a non-empty list of k >= 1".into());
        }
        if self.analyses.is_empty() {
            return bad("analyses must not be empty".into());
        }
        if self.seeds.expand().is_empty() {
            return bad("seeds must not be empty".into());
        }
        if let TauSetting::Radius(r) = self.tau {
            if !(r > 0.0) {
                return bad(format!("tau must be positive, got {r}"));
            }
        }
        if !(self.test.alpha > 0.0 && self.test.alpha < 1.0) {
            return bad(format!("test.alpha must lie in (0, 1), got {}", self.test.alpha));
        }
        let needs = |a: Analysis, present: bool, table: &str| {
            if self.analyses.contains(&a) && !present {
                Err(HarnessError::Config(format!("analysis '{}' needs a [{table}] table", a.name())))
            } else {
                Ok(())
            }
        };
        needs(Analysis::ThresholdSearch, self.threshold.is_some(), "threshold")?;
        needs(Analysis::Dependence, self.dependence.is_some(), "dependence")?;
        needs(Analysis::PimaxScaling, self.pimax.is_some(), "pimax")?;
        Ok(())
    }
}
