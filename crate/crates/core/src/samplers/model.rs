use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::*;
use crate::cloud::PointCloud;
use crate::error::Result;
use crate::io;

/// Any sampler with its parameters, in a flat form suited to config files:
/// `sampler = "annulus"` plus the parameter keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Box { dim: usize },
    Ball { dim: usize },
    Annulus { dim: usize, r_in: f64, r_out: f64 },
    Sphere { dim: usize },
    Beta { dim: usize, a: f64, b: f64 },
    Normal { dim: usize },
    Cauchy { dim: usize },
    Torus { r1: f64, r2: f64 },
    Klein,
    Projective,
    Henneberg,
    Linkage,
    CutAnnulus { r_in: f64, r_out: f64, width: f64 },
    FigureEight { r_in: f64, r_out: f64, gap: f64 },
    Stratified { p_plane: f64 },
    Brownian { dim: usize },
    Lorenz {
        #[serde(default = "lorenz_sigma")]
        sigma: f64,
        #[serde(default = "lorenz_rho")]
        rho: f64,
        #[serde(default = "lorenz_beta")]
        beta: f64,
        #[serde(default = "lorenz_dt")]
        dt: f64,
        #[serde(default = "lorenz_substeps")]
        substeps: usize,
    },
    /// `side^dim` points; the requested count is ignored.
    PerturbedGrid { dim: usize, side: usize, sigma: f64 },
    Mesh {
        path: PathBuf,
        #[serde(default)]
        weighting: MeshWeighting,
    },
    /// Delay embedding of a numeric signal file; the point count follows
    /// from the signal length and the request is ignored.
    Delay { path: PathBuf, dim: usize, delta: usize, lag: usize },
}

fn lorenz_sigma() -> f64 {
    LorenzParams::default().sigma
}
fn lorenz_rho() -> f64 {
    LorenzParams::default().rho
}
fn lorenz_beta() -> f64 {
    LorenzParams::default().beta
}
fn lorenz_dt() -> f64 {
    LorenzParams::default().dt
}
fn lorenz_substeps() -> usize {
    LorenzParams::default().substeps
}

impl ModelSpec {
    fn iid(&self) -> Option<IidModel> {
        let (kind, dim) = match *self {
            ModelSpec::Box { dim } => (IidKind::Box, dim),
            ModelSpec::Ball { dim } => (IidKind::Ball, dim),
            ModelSpec::Annulus { dim, r_in, r_out } => (IidKind::Annulus { r_in, r_out }, dim),
            ModelSpec::Sphere { dim } => (IidKind::Sphere, dim),
            ModelSpec::Beta { dim, a, b } => (IidKind::Beta { a, b }, dim),
            ModelSpec::Normal { dim } => (IidKind::Normal, dim),
            ModelSpec::Cauchy { dim } => (IidKind::Cauchy, dim),
            _ => return None,
        };
        Some(IidModel { kind, dim })
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<PointCloud> {
        if let Some(model) = self.iid() {
            return sample_iid(&model, n, seed);
        }
        match self {
            ModelSpec::Torus { r1, r2 } => sample_manifold(&ManifoldModel::Torus { r1: *r1, r2: *r2 }, n, seed),
            ModelSpec::Klein => sample_manifold(&ManifoldModel::Klein, n, seed),
            ModelSpec::Projective => sample_manifold(&ManifoldModel::Projective, n, seed),
            ModelSpec::Henneberg => sample_manifold(&ManifoldModel::Henneberg, n, seed),
            ModelSpec::Linkage => sample_manifold(&ManifoldModel::Linkage, n, seed),
            &ModelSpec::CutAnnulus { r_in, r_out, width } => {
                sample_planar(&PlanarShape::CutAnnulus { r_in, r_out, width }, n, seed)
            }
            &ModelSpec::FigureEight { r_in, r_out, gap } => {
                sample_planar(&PlanarShape::FigureEight { r_in, r_out, gap }, n, seed)
            }
            ModelSpec::Stratified { p_plane } => sample_stratified(*p_plane, n, seed),
            ModelSpec::Brownian { dim } => sample_brownian(*dim, n, seed),
            &ModelSpec::Lorenz { sigma, rho, beta, dt, substeps } => {
                sample_lorenz(&LorenzParams { sigma, rho, beta, dt, substeps, initial: None }, n, seed)
            }
            ModelSpec::PerturbedGrid { dim, side, sigma } => sample_perturbed_grid(*dim, *side, *sigma, seed),
            ModelSpec::Mesh { path, weighting } => sample_mesh(&io::read_off(path)?, *weighting, n, seed),
            ModelSpec::Delay { path, dim, delta, lag } => delay_embed(&io::read_signal(path)?, *dim, *delta, *lag),
            _ => unreachable!("iid models handled above"),
        }
    }
}
