//! Per-cycle significance tests and the search for a threshold that resolves
//! infinite cycles.
//!
//! Under the null hypothesis a cycle's ℓ-value follows the LGumbel law, so
//! its p-value is the survival function `exp(−e^ℓ)`. Tests are Bonferroni
//! corrected over the whole diagram, infinite cycles included.

use serde::{Deserialize, Serialize, Serializer};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::filtration::{enclosing_radius_of, ComplexType};
use crate::persistence::PersistenceDiagram;
use crate::pipeline;
use crate::universality::{l_of, l_values, pi_values_finite};

/// Multiplier on the enclosing radius past which the search gives up.
pub const GUARD_FACTOR: f64 = 1.25;

/// `exp(−exp(l))`: the LGumbel survival function.
pub fn p_value(l: f64) -> f64 {
    (-l.exp()).exp()
}

/// Bonferroni-adjusted p-value `min(1, m·p)`.
pub fn p_adjusted(p: f64, m: usize) -> f64 {
    (p * m as f64).min(1.0)
}

/// The smallest π whose p-value is below `x`: `exp(exp((loglog(1/x) − B)/A))`.
pub fn pi_min(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain(format!("level {x} outside (0, 1)")));
    }
    Ok((((1.0 / x).ln().ln() - b) / a).exp().exp())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Correction {
    #[default]
    Bonferroni,
}

fn inf_as_text<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

/// One tested cycle. For an infinite cycle `pi` is the lower bound `τ/b` and
/// `p` the matching upper bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleRecord {
    pub birth: f64,
    #[serde(serialize_with = "inf_as_text")]
    pub death: f64,
    pub pi: f64,
    pub l: f64,
    #[serde(rename = "p")]
    pub p_value: f64,
    pub p_adjusted: f64,
    pub significant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub alpha: f64,
    pub correction: Correction,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub cycles: Vec<CycleRecord>,
}

impl TestReport {
    pub fn significant(&self) -> impl Iterator<Item = &CycleRecord> {
        self.cycles.iter().filter(|c| c.significant)
    }

    pub fn n_significant(&self) -> usize {
        self.significant().count()
    }

    /// The cycle with the largest π.
    pub fn most_persistent(&self) -> Option<&CycleRecord> {
        self.cycles.iter().max_by(|x, y| x.pi.total_cmp(&y.pi))
    }
}

/// An infinite cycle is settled once the threshold reaches `b·π_min`. The
/// search sets `τ` to exactly that product, so the comparison is inclusive
/// and made in the same form to stay exact.
fn resolved(birth: f64, tau: f64, pmin: f64) -> bool {
    birth * pmin <= tau
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("significance level {alpha} outside (0, 1)")))
    }
}

/// Tests every cycle of a diagram with no infinite pairs.
pub fn signal_cycles(dgm: &PersistenceDiagram, complex_type: ComplexType, alpha: f64) -> Result<TestReport> {
    if dgm.n_infinite() > 0 {
        return Err(Error::InfinitePairs(dgm.n_infinite()));
    }
    test_diagram(dgm, complex_type, alpha)
}

/// Tests every cycle; `B` comes from the finite pairs, and an infinite cycle
/// born at `b` is significant once `τ ≥ b·π_min(α/m)`.
pub fn test_diagram(dgm: &PersistenceDiagram, complex_type: ComplexType, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if dgm.len() < 2 {
        return Err(Error::InsufficientData(format!("testing needs at least 2 cycles, got {}", dgm.len())));
    }
    let l = l_values(&pi_values_finite(dgm, complex_type)?)?;
    let m = dgm.len();
    let cutoff = alpha / m as f64;
    let pmin = pi_min(cutoff, l.a, l.b)?;
    let cycles = dgm
        .pairs
        .iter()
        .map(|&(birth, death)| {
            let finite = death.is_finite();
            let pi = if finite { death / birth } else { dgm.tau / birth };
            let lv = l_of(pi, l.a, l.b);
            let p = p_value(lv);
            let significant = if finite { p < cutoff } else { resolved(birth, dgm.tau, pmin) };
            CycleRecord { birth, death, pi, l: lv, p_value: p, p_adjusted: p_adjusted(p, m), significant }
        })
        .collect();
    Ok(TestReport { alpha, correction: Correction::Bonferroni, m, a: l.a, b: l.b, cycles })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// Next threshold from the earliest-born unresolved cycle.
    #[default]
    #[serde(alias = "earliest")]
    EarliestBorn,
    /// Next threshold from the latest-born unresolved cycle.
    #[serde(alias = "latest")]
    LatestBorn,
}

impl std::str::FromStr for ThresholdPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "earliest" | "earliest_born" => Ok(ThresholdPolicy::EarliestBorn),
            "latest" | "latest_born" => Ok(ThresholdPolicy::LatestBorn),
            other => Err(Error::param(format!("unknown threshold policy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub tau: f64,
    /// Diagram size, infinite cycles included.
    pub m: usize,
    /// Births of the unresolved infinite cycles.
    pub unresolved: Vec<f64>,
    #[serde(rename = "I_size")]
    pub i_size: usize,
    #[serde(rename = "B")]
    pub b: f64,
    pub pi_min: f64,
    pub next_tau: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdTrace {
    pub iterations: Vec<TraceStep>,
    pub final_tau: f64,
    pub policy: ThresholdPolicy,
}

/// Raises the threshold until every infinite cycle either dies or is long
/// enough already to be significant.
///
/// Each round computes `dgm_k(τ)`, re-estimates `B` from its finite pairs and
/// collects the births `I` of infinite cycles with `τ < b·π_min(α/m)`. While
/// `I` is non-empty, `τ` moves to `min(I)·π_min` (or `max(I)·π_min` under
/// [`ThresholdPolicy::LatestBorn`]). The threshold never goes past the
/// enclosing radius, where every class has died; if cycles are somehow still
/// open there the search allows [`GUARD_FACTOR`] times that radius and then
/// fails with [`Error::NonTermination`].
pub fn threshold_search(
    cloud: &PointCloud,
    complex_type: ComplexType,
    k: usize,
    alpha: f64,
    tau0: f64,
    policy: ThresholdPolicy,
) -> Result<(PersistenceDiagram, ThresholdTrace)> {
    check_alpha(alpha)?;
    if !(tau0 > 0.0 && tau0.is_finite()) {
        return Err(Error::param(format!("tau0 must be positive and finite, got {tau0}")));
    }
    let enclosing = enclosing_radius_of(cloud);
    let limit = GUARD_FACTOR * enclosing;
    let mut tau = tau0;
    let mut iterations = Vec::new();
    loop {
        let dgm = pipeline::diagram(cloud, complex_type, k, tau)?;
        let m = dgm.len();
        let pi = pi_values_finite(&dgm, complex_type)?;
        let b = match l_values(&pi) {
            Ok(l) => l.b,
            Err(Error::InsufficientData(_)) if dgm.n_infinite() == 0 => f64::NAN,
            Err(Error::InsufficientData(msg)) => {
                return Err(Error::InsufficientData(format!(
                    "{msg} at tau = {tau}; B cannot be estimated, start from a larger tau0"
                )))
            }
            Err(e) => return Err(e),
        };
        let (unresolved, pmin) = if dgm.n_infinite() == 0 {
            (Vec::new(), f64::NAN)
        } else {
            let pmin = pi_min(alpha / m as f64, complex_type.a(), b)?;
            let i: Vec<f64> =
                dgm.pairs.iter().filter(|p| p.1.is_infinite() && !resolved(p.0, tau, pmin)).map(|p| p.0).collect();
            (i, pmin)
        };
        let next = match policy {
            ThresholdPolicy::EarliestBorn => unresolved.iter().copied().reduce(f64::min),
            ThresholdPolicy::LatestBorn => unresolved.iter().copied().reduce(f64::max),
        }
        .map(|b| b * pmin);
        iterations.push(TraceStep { tau, m, i_size: unresolved.len(), unresolved, b, pi_min: pmin, next_tau: next });
        let Some(t) = next else {
            return Ok((dgm, ThresholdTrace { iterations, final_tau: tau, policy }));
        };
        // Every class is dead by the enclosing radius, so going further
        // cannot change the diagram.
        tau = if tau < enclosing {
            t.min(enclosing)
        } else if tau < limit {
            t.min(limit)
        } else {
            return Err(Error::NonTermination(format!(
                "{} cycle(s) still unresolved at {GUARD_FACTOR} x enclosing radius ({limit}) after {} iterations",
                iterations.last().map_or(0, |s| s.i_size),
                iterations.len()
            )));
        };
        if let Some(last) = iterations.last_mut() {
            last.next_tau = Some(tau);
        }
    }
}
