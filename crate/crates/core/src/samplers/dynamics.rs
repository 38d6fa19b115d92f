use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::check_count;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

/// Random walk `X_i = Z_1 + ... + Z_i` with standard normal increments in R^d.
pub fn sample_brownian(d: usize, n: usize, seed: u64) -> Result<PointCloud> {
    if d == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    check_count(n)?;
    let tag = format!("brownian/d{d}");
    let mut rng = rng::stream(seed, &tag);
    let mut pos = vec![0.0; d];
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n {
        for x in pos.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *x += z;
        }
        coords.extend_from_slice(&pos);
    }
    PointCloud::from_flat(coords, d, tag, seed, Some(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    /// Time between consecutive output points.
    pub dt: f64,
    /// RK4 steps taken per output step. A single step of 0.1 diverges for
    /// the stiff parameter set (45, 54, 10).
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// Starting point; drawn uniformly from `[0,1]^3` when absent.
    #[serde(default)]
    pub initial: Option<[f64; 3]>,
}

fn default_substeps() -> usize {
    10
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 45.0,
            rho: 54.0,
            beta: 10.0,
            dt: 0.1,
            substeps: default_substeps(),
            initial: None,
        }
    }
}

impl LorenzParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.sigma, self.rho, self.beta, self.dt];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::param("lorenz sigma, rho, beta and dt must be positive"));
        }
        if self.substeps == 0 {
            return Err(Error::param("lorenz substeps must be at least 1"));
        }
        if let Some(p) = self.initial {
            if p.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::param("lorenz initial point must lie in [0,1]^3"));
            }
        }
        Ok(())
    }

    fn field(&self, s: [f64; 3]) -> [f64; 3] {
        [
            self.sigma * (s[1] - s[0]),
            s[0] * (self.rho - s[2]) - s[1],
            s[0] * s[1] - self.beta * s[2],
        ]
    }

    fn rk4(&self, s: [f64; 3], h: f64) -> [f64; 3] {
        let add = |a: [f64; 3], b: [f64; 3], t: f64| [a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]];
        let k1 = self.field(s);
        let k2 = self.field(add(s, k1, h / 2.0));
        let k3 = self.field(add(s, k2, h / 2.0));
        let k4 = self.field(add(s, k3, h));
        std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    }
}

/// Lorenz trajectory sampled every `dt`, starting from the initial point.
pub fn sample_lorenz(params: &LorenzParams, n: usize, seed: u64) -> Result<PointCloud> {
    params.validate()?;
    check_count(n)?;
    let tag = "lorenz".to_string();
    let mut rng = rng::stream(seed, &tag);
    let mut state = params
        .initial
        .unwrap_or_else(|| std::array::from_fn(|_| rng.random::<f64>()));
    let h = params.dt / params.substeps as f64;
    let mut coords = Vec::with_capacity(3 * n);
    coords.extend_from_slice(&state);
    for step in 1..n {
        for _ in 0..params.substeps {
            state = params.rk4(state, h);
        }
        if state.iter().any(|c| !c.is_finite()) {
            return Err(Error::Integration { step });
        }
        coords.extend_from_slice(&state);
    }
    PointCloud::from_flat(coords, 3, tag, seed, None)
}
