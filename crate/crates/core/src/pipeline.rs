//! Point-cloud to diagram, with the truncation policy in one place.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::filtration::{build_alpha, build_cech, build_rips, enclosing_radius_of, pairwise_distances, ComplexType, NeighborGraph};
use crate::persistence::{extract_diagram, filtration_intervals, rips_intervals, PersistenceDiagram};

/// How far to build the filtration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauPolicy {
    Fixed(f64),
    /// Rips: grow the radius until no degree-k class is infinite.
    /// Alpha and Čech: the whole filtration.
    Auto,
    /// The enclosing radius, past which the Rips complex is a cone.
    Enclosing,
}

/// Rips growth factor under [`TauPolicy::Auto`].
pub const AUTO_GROWTH: f64 = 1.5;

/// Degree-`k` diagram truncated at `tau` (which may be infinite for alpha).
pub fn diagram(cloud: &PointCloud, complex_type: ComplexType, k: usize, tau: f64) -> Result<PersistenceDiagram> {
    if k == 0 {
        return Err(Error::UnsupportedDegree(0));
    }
    if !(tau > 0.0) {
        return Err(Error::param(format!("threshold must be positive, got {tau}")));
    }
    let n = cloud.len();
    let intervals = match complex_type {
        ComplexType::Rips if tau.is_infinite() => {
            return Err(Error::param("Rips filtrations need a finite threshold"));
        }
        ComplexType::Rips if k <= 2 => rips_intervals(&NeighborGraph::from_cloud(cloud, tau), k)?,
        ComplexType::Rips => filtration_intervals(&build_rips(&pairwise_distances(cloud), tau, k + 1), &[k])?,
        ComplexType::Alpha => filtration_intervals(&build_alpha(cloud, tau)?, &[k])?,
        ComplexType::Cech => filtration_intervals(&build_cech(cloud, tau, k + 1), &[k])?,
    };
    extract_diagram(&intervals, k, tau, n)
}

pub fn diagram_with(cloud: &PointCloud, complex_type: ComplexType, k: usize, policy: TauPolicy) -> Result<PersistenceDiagram> {
    match (policy, complex_type) {
        (TauPolicy::Fixed(tau), _) => diagram(cloud, complex_type, k, tau),
        (TauPolicy::Enclosing, _) => diagram(cloud, complex_type, k, enclosing_radius_of(cloud).max(f64::MIN_POSITIVE)),
        (TauPolicy::Auto, ComplexType::Rips) => rips_auto(cloud, k),
        (TauPolicy::Auto, _) => diagram(cloud, complex_type, k, f64::INFINITY),
    }
}

/// Largest nearest-neighbour distance.
fn nn_radius(cloud: &PointCloud) -> f64 {
    let n = cloud.len();
    (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| cloud.distance(i.min(j), i.max(j))).fold(f64::INFINITY, f64::min))
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max)
}

fn rips_auto(cloud: &PointCloud, k: usize) -> Result<PersistenceDiagram> {
    let cap = enclosing_radius_of(cloud);
    if !(cap > 0.0) {
        return diagram(cloud, ComplexType::Rips, k, f64::MIN_POSITIVE);
    }
    let mut tau = (2.0 * nn_radius(cloud)).min(cap).max(cap * 1e-6);
    loop {
        let dgm = diagram(cloud, ComplexType::Rips, k, tau)?;
        if dgm.n_infinite() == 0 || tau >= cap {
            return Ok(dgm);
        }
        tau = (tau * AUTO_GROWTH).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{sample_iid, IidKind, IidModel};

    fn square() -> PointCloud {
        PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], "t", 0, None).unwrap()
    }

    #[test]
    fn square_under_each_engine() {
        let r2 = 2f64.sqrt();
        assert_eq!(diagram(&square(), ComplexType::Rips, 1, 1.5).unwrap().pairs, vec![(1.0, r2)]);
        assert_eq!(diagram(&square(), ComplexType::Rips, 1, 1.2).unwrap().pairs, vec![(1.0, f64::INFINITY)]);
        let alpha = diagram(&square(), ComplexType::Alpha, 1, f64::INFINITY).unwrap();
        assert_eq!(alpha.len(), 1);
        assert!((alpha.pairs[0].0 - 0.5).abs() < 1e-15 && (alpha.pairs[0].1 - r2 / 2.0).abs() < 1e-15);
        assert_eq!(diagram(&square(), ComplexType::Cech, 1, f64::INFINITY).unwrap().pairs, alpha.pairs);
        assert!(matches!(diagram(&square(), ComplexType::Rips, 0, 1.0), Err(Error::UnsupportedDegree(0))));
        assert!(diagram(&square(), ComplexType::Rips, 1, f64::INFINITY).is_err());
    }

    #[test]
    fn auto_rips_resolves_every_class() {
        let cloud = sample_iid(&IidModel::new(IidKind::Box, 2).unwrap(), 300, 4).unwrap();
        let dgm = diagram_with(&cloud, ComplexType::Rips, 1, TauPolicy::Auto).unwrap();
        assert_eq!(dgm.n_infinite(), 0);
        assert!(dgm.len() > 10);
        let encl = diagram_with(&cloud, ComplexType::Rips, 1, TauPolicy::Enclosing).unwrap();
        assert_eq!(dgm.pairs, encl.pairs);
    }

    #[test]
    fn higher_degrees_go_through_explicit_filtrations() {
        let cloud = sample_iid(&IidModel::new(IidKind::Sphere, 3).unwrap(), 40, 1).unwrap();
        let d3 = diagram(&cloud, ComplexType::Rips, 3, 1.0).unwrap();
        assert_eq!(d3.k, 3);
    }
}
