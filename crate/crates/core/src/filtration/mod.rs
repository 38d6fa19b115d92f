//! Filtered simplicial complexes built from point clouds.
//!
//! Two constructions are provided: the Vietoris–Rips filtration (simplex
//! value = largest pairwise distance) in any dimension, and the Delaunay–alpha
//! filtration in the plane and in space, with values reported as radii.

mod alpha;
mod delaunay;
mod distance;
pub mod geometry;
mod rips;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use alpha::{build_alpha, build_cech};
pub use delaunay::{delaunay, Triangulation};
pub use distance::{enclosing_radius, enclosing_radius_of, pairwise_distances, DistanceMatrix, NeighborGraph};
pub use rips::{build_rips, DEFAULT_RIPS_MAX_DIM};

/// Vertex list of a simplex, sorted ascending.
pub type Vertices = SmallVec<[u32; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexType {
    Rips,
    Alpha,
    Cech,
}

impl ComplexType {
    /// Slope of the ℓ-transform: 1 for Rips, 1/2 for Čech and alpha.
    pub fn a(self) -> f64 {
        match self {
            ComplexType::Rips => 1.0,
            ComplexType::Alpha | ComplexType::Cech => 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComplexType::Rips => "rips",
            ComplexType::Alpha => "alpha",
            ComplexType::Cech => "cech",
        }
    }
}

impl std::str::FromStr for ComplexType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rips" => Ok(ComplexType::Rips),
            "alpha" => Ok(ComplexType::Alpha),
            "cech" => Ok(ComplexType::Cech),
            other => Err(Error::param(format!("unknown complex type '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Simplex {
    pub vertices: Vertices,
    pub value: f64,
}

impl Simplex {
    pub fn new(vertices: impl IntoIterator<Item = u32>, value: f64) -> Self {
        let mut vertices: Vertices = vertices.into_iter().collect();
        vertices.sort_unstable();
        Self { vertices, value }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Total order on simplices: value, then dimension, then vertex tuple.
pub fn simplex_order(a: &Simplex, b: &Simplex) -> std::cmp::Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.vertices.len().cmp(&b.vertices.len()))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

#[derive(Clone, Debug)]
pub struct Filtration {
    simplices: Vec<Simplex>,
    pub complex_type: ComplexType,
    pub tau: f64,
    pub max_dim: usize,
}

impl Filtration {
    /// Sorts `simplices` into filtration order. Simplices above `tau` or
    /// `max_dim` are dropped.
    pub fn new(mut simplices: Vec<Simplex>, complex_type: ComplexType, tau: f64, max_dim: usize) -> Self {
        simplices.retain(|s| s.value <= tau && s.dim() <= max_dim);
        simplices.sort_by(simplex_order);
        Self { simplices, complex_type, tau, max_dim }
    }

    /// Wraps simplices that are already in the intended order, without sorting.
    pub fn from_ordered(simplices: Vec<Simplex>, complex_type: ComplexType, tau: f64, max_dim: usize) -> Self {
        Self { simplices, complex_type, tau, max_dim }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }

    /// Boundary columns as sorted filtration indices. Fails if a face is
    /// missing or does not precede its coface.
    pub fn boundaries(&self) -> Result<Vec<SmallVec<[u32; 4]>>> {
        let index: HashMap<&[u32], u32> = self
            .simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.as_slice(), i as u32))
            .collect();
        if index.len() != self.simplices.len() {
            return Err(Error::Structural("filtration lists a simplex twice".into()));
        }
        let mut out = Vec::with_capacity(self.simplices.len());
        let mut face: Vertices = SmallVec::new();
        for (j, s) in self.simplices.iter().enumerate() {
            let mut col: SmallVec<[u32; 4]> = SmallVec::new();
            if s.vertices.len() > 1 {
                for skip in 0..s.vertices.len() {
                    face.clear();
                    face.extend(s.vertices.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                    let i = *index.get(face.as_slice()).ok_or_else(|| {
                        Error::Structural(format!("face {face:?} of simplex {:?} is missing", s.vertices))
                    })?;
                    if i as usize >= j {
                        return Err(Error::Structural(format!(
                            "face {face:?} appears after its coface {:?}",
                            s.vertices
                        )));
                    }
                    col.push(i);
                }
                col.sort_unstable();
            }
            out.push(col);
        }
        Ok(out)
    }

    /// Checks face order, value monotonicity, nondecreasing order and the
    /// truncation bound.
    pub fn validate(&self) -> Result<()> {
        let bd = self.boundaries()?;
        for (j, s) in self.simplices.iter().enumerate() {
            if s.value > self.tau {
                return Err(Error::Structural(format!("simplex {:?} exceeds tau", s.vertices)));
            }
            if j > 0 && self.simplices[j - 1].value > s.value {
                return Err(Error::Structural(format!("values decrease at position {j}")));
            }
            if bd[j].iter().any(|&i| self.simplices[i as usize].value > s.value) {
                return Err(Error::Structural(format!("simplex {:?} precedes a face's value", s.vertices)));
            }
        }
        Ok(())
    }

    /// Debug dump: one "value dim v0 v1 ..." line per simplex.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.simplices {
            let _ = write!(out, "{} {}", s.value, s.dim());
            for v in &s.vertices {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}
