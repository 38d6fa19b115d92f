//! Seeded point-cloud generators.
//!
//! Every generator is a pure function of its parameters and seed: the same
//! call returns bit-identical coordinates. Randomness comes from
//! [`crate::rng::stream`] keyed by the model tag recorded on the cloud.

mod dynamics;
mod embed;
mod iid;
mod manifold;
mod mesh;
mod model;
mod planar;

pub use dynamics::{sample_brownian, sample_lorenz, LorenzParams};
pub use embed::{delay_embed, sample_perturbed_grid};
pub use iid::{sample_iid, IidKind, IidModel};
pub use manifold::{linkage_proposal, sample_manifold, sample_manifold_with_params, ManifoldModel};
pub use mesh::{sample_mesh, MeshWeighting, TriangleMesh};
pub use model::ModelSpec;
pub use planar::{sample_planar, sample_stratified, PlanarShape};

use crate::error::{Error, Result};

/// Maximum proposals per accepted point in rejection samplers.
pub const MAX_REJECTION_ATTEMPTS: usize = 10_000;

pub(crate) fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("sample size must be at least 1"))
    } else {
        Ok(())
    }
}

/// Rejection loop shared by the ball, annulus and planar-shape samplers.
pub(crate) fn rejection<R, P, A>(rng: &mut R, mut propose: P, accept: A) -> Result<Vec<f64>>
where
    P: FnMut(&mut R) -> Vec<f64>,
    A: Fn(&[f64]) -> bool,
{
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let x = propose(rng);
        if accept(&x) {
            return Ok(x);
        }
    }
    Err(Error::param(format!(
        "rejection sampling exceeded {MAX_REJECTION_ATTEMPTS} attempts for one point"
    )))
}
