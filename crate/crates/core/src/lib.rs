//! Random point-clouds, Rips and Delaunay-alpha persistence, and the statistics
//! used to test whether persistence diagrams follow a universal law.
//!
//! The pipeline is:
//!
//! * [`samplers`] draw seeded point-clouds from iid, manifold, stratified,
//!   mesh and dynamical models.
//! * [`filtration`] builds threshold-truncated Vietoris–Rips filtrations and
//!   Delaunay-alpha filtrations (values reported as radii).
//! * [`persistence`] reduces filtrations over Z/2 and extracts diagrams.
//! * [`universality`] turns diagrams into π-values and ℓ-values and compares
//!   them against the left-skewed Gumbel law.
//! * [`inference`] assigns per-cycle p-values and finds thresholds that
//!   resolve infinite cycles.
//! * [`dependence`] measures pairwise dependence between ℓ-values of the
//!   same diagram.

pub mod cloud;
pub mod dependence;
mod error;
pub mod filtration;
pub mod inference;
pub mod io;
pub mod persistence;
pub mod pipeline;
pub mod rng;
pub mod samplers;
pub mod universality;

pub use cloud::PointCloud;
pub use error::{Error, Result};
pub use filtration::{ComplexType, Filtration};
pub use persistence::PersistenceDiagram;
