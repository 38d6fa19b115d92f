//! π-values, ℓ-values and the left-skewed Gumbel (LGumbel) reference law.
//!
//! For a pair `(b, d)` the π-value is `d / b`. Over a diagram the ℓ-values
//! are `ℓ = A·log log π + B` with `A = 1` for Rips and `A = 1/2` for Čech or
//! alpha, and `B = −λ − A·L̄` where `L̄` is the mean of `log log π` and `λ` the
//! Euler–Mascheroni constant. The conjectured limit law of ℓ has CDF
//! `1 − exp(−eˣ)`, whose mean is `−λ`; the centring by `B` matches that mean.

use rand::Rng;
use serde::Serialize;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::filtration::ComplexType;
use crate::persistence::PersistenceDiagram;

/// Euler–Mascheroni constant to ten decimals.
pub const EULER_GAMMA: f64 = 0.5772156649;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiValueSet {
    pub values: Vec<f64>,
    pub k: usize,
    pub complex_type: ComplexType,
    pub tau: f64,
    pub n_points: usize,
    /// Infinite pairs left out of `values`.
    pub n_infinite: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LValueSet {
    pub values: Vec<f64>,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "Lbar")]
    pub lbar: f64,
    pub n_infinite: usize,
}

/// π-values of a diagram with no infinite pairs.
pub fn pi_values(dgm: &PersistenceDiagram, complex_type: ComplexType) -> Result<PiValueSet> {
    let inf = dgm.n_infinite();
    if inf > 0 {
        return Err(Error::InfinitePairs(inf));
    }
    pi_values_finite(dgm, complex_type)
}

/// π-values of the finite pairs; infinite pairs are counted, not used.
pub fn pi_values_finite(dgm: &PersistenceDiagram, complex_type: ComplexType) -> Result<PiValueSet> {
    let mut values = Vec::with_capacity(dgm.len());
    for (b, d) in dgm.finite() {
        if !(b > 0.0) {
            return Err(Error::domain(format!("pair ({b}, {d}) has a non-positive birth")));
        }
        values.push(d / b);
    }
    Ok(PiValueSet {
        values,
        k: dgm.k,
        complex_type,
        tau: dgm.tau,
        n_points: dgm.n_points,
        n_infinite: dgm.n_infinite(),
    })
}

impl PiValueSet {
    /// Drops the `m` largest values (manual removal of known signal cycles).
    pub fn without_top(&self, m: usize) -> PiValueSet {
        let mut values = self.values.clone();
        values.sort_by(f64::total_cmp);
        values.truncate(values.len().saturating_sub(m));
        PiValueSet { values, ..self.clone() }
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().max_by(f64::total_cmp)
    }
}

pub fn l_values(pi: &PiValueSet) -> Result<LValueSet> {
    l_values_with(&pi.values, pi.complex_type.a()).map(|mut l| {
        l.n_infinite = pi.n_infinite;
        l
    })
}

/// ℓ-values for an explicit slope `a`.
pub fn l_values_with(pi: &[f64], a: f64) -> Result<LValueSet> {
    if pi.len() < 2 {
        return Err(Error::InsufficientData(format!("ℓ-values need at least 2 π-values, got {}", pi.len())));
    }
    if let Some(bad) = pi.iter().find(|&&p| !(p > 1.0)) {
        return Err(Error::domain(format!("π-value {bad} is not above 1")));
    }
    let ll: Vec<f64> = pi.iter().map(|p| p.ln().ln()).collect();
    let lbar = ll.iter().sum::<f64>() / ll.len() as f64;
    let b = -EULER_GAMMA - a * lbar;
    Ok(LValueSet { values: ll.iter().map(|x| a * x + b).collect(), a, b, lbar, n_infinite: 0 })
}

/// `ℓ` of a single π under fixed constants.
pub fn l_of(pi: f64, a: f64, b: f64) -> f64 {
    a * pi.ln().ln() + b
}

/// `B` of a diagram's finite pairs.
pub fn estimate_b(dgm: &PersistenceDiagram, complex_type: ComplexType) -> Result<f64> {
    l_values(&pi_values_finite(dgm, complex_type)?).map(|l| l.b)
}

/// Lifetimes `death − birth` of the finite pairs.
pub fn lifetimes(dgm: &PersistenceDiagram) -> Vec<f64> {
    dgm.finite().map(|(b, d)| d - b).collect()
}

pub fn lgumbel_cdf(x: f64) -> f64 {
    -(-x.exp()).exp_m1()
}

pub fn lgumbel_pdf(x: f64) -> f64 {
    (x - x.exp()).exp()
}

pub fn lgumbel_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
    }
    Ok((-(-q).ln_1p()).ln())
}

/// One LGumbel draw by inversion.
pub fn lgumbel_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            // 1 − q is uniform as well, so log(−log u) has the same law.
            return (-u.ln()).ln();
        }
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Right-continuous empirical CDF.
#[derive(Clone, Debug)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

pub fn ecdf(values: &[f64]) -> Ecdf {
    Ecdf { sorted: sorted(values) }
}

impl Ecdf {
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// `(x, F(x))` at every distinct jump point.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let m = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = (i + 1) as f64 / m,
                _ => out.push((x, (i + 1) as f64 / m)),
            }
        }
        out
    }
}

/// `(theoretical, empirical)` quantile pairs with plotting positions
/// `(i − 0.5)/m`.
pub fn qq_against_lgumbel(values: &[f64]) -> Vec<(f64, f64)> {
    let s = sorted(values);
    let m = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| (lgumbel_quantile((i as f64 + 0.5) / m).expect("level in (0,1)"), x))
        .collect()
}

/// Silverman's rule `0.9·min(σ, IQR/1.34)·m^(−1/5)`.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let sd = (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0)).sqrt();
    let s = sorted(values);
    let q = |p: f64| {
        let h = p * (s.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    };
    let iqr = q(0.75) - q(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * m.powf(-0.2)
}

/// Gaussian kernel density estimate at `x`.
pub fn kde_at(values: &[f64], h: f64, x: f64) -> f64 {
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * values.len() as f64);
    values.iter().map(|v| (-0.5 * ((x - v) / h).powi(2)).exp()).sum::<f64>() * norm
}

/// Density curve `(x, f(x))` on `points` evenly spaced abscissae spanning
/// the data plus three bandwidths on each side.
pub fn kde(values: &[f64], bandwidth: Option<f64>, points: usize) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::InsufficientData("density estimate of no values".into()));
    }
    let h = match bandwidth {
        Some(h) => h,
        None if values.len() >= 2 => silverman_bandwidth(values),
        None => return Err(Error::InsufficientData("bandwidth rule needs at least 2 values".into())),
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("bandwidth {h} must be positive")));
    }
    let s = sorted(values);
    let (lo, hi) = (s[0] - 3.0 * h, s[s.len() - 1] + 3.0 * h);
    let points = points.max(2);
    Ok((0..points)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (x, kde_at(values, h, x))
        })
        .collect())
}

/// Kolmogorov–Smirnov distance from the ECDF of `values` to the LGumbel CDF,
/// checking both one-sided gaps at every jump.
pub fn ks_to_lgumbel(values: &[f64]) -> f64 {
    let s = sorted(values);
    let m = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = lgumbel_cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// The same statistic read off a QQ construction: with `x_(i)` the sorted
/// empirical values, `KS = max |F(x_(i)) − (i − 0.5)/m| + 1/(2m)`.
pub fn ks_from_qq(qq: &[(f64, f64)]) -> f64 {
    let m = qq.len() as f64;
    qq.iter()
        .enumerate()
        .map(|(i, &(_, x))| (lgumbel_cdf(x) - (i as f64 + 0.5) / m).abs())
        .fold(0.0, f64::max)
        + 0.5 / m
}

/// Two-sample Kolmogorov–Smirnov distance between empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (ma, mb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / ma - j as f64 / mb).abs());
    }
    best
}

/// Growth rate `(log n / log log n)^(1/k)` of the largest π-value.
pub fn pimax_rate(n: usize, k: usize) -> f64 {
    let ln = (n as f64).ln();
    (ln / ln.ln()).powf(1.0 / k as f64)
}

/// Scalar diagnostics of one diagram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "Lbar")]
    pub lbar: f64,
    pub ks: f64,
    pub n_pairs: usize,
    pub n_infinite: usize,
}

pub fn stats_report(l: &LValueSet) -> StatsReport {
    StatsReport {
        a: l.a,
        b: l.b,
        lbar: l.lbar,
        ks: ks_to_lgumbel(&l.values),
        n_pairs: l.values.len(),
        n_infinite: l.n_infinite,
    }
}

/// Two-column CSV with the given header.
pub fn pairs_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for (a, b) in rows {
        let _ = writeln!(out, "{a},{b}");
    }
    out
}
