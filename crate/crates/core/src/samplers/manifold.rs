use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_count, MAX_REJECTION_ATTEMPTS};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

/// Parametrized surfaces. Points are uniform in parameter space, not in
/// surface measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldModel {
    /// `r1` is the distance from the centre to the tube centre, `r2` the tube radius.
    Torus { r1: f64, r2: f64 },
    Klein,
    Projective,
    Henneberg,
    /// Closed unit pentagonal linkage with `p1 = (0,0)`, `p2 = (1,0)` pinned.
    Linkage,
}

impl ManifoldModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ManifoldModel::Torus { r1, r2 } if !(r1 > r2 && r2 > 0.0) => Err(Error::param(
                format!("torus needs r1 > r2 > 0, got r1={r1}, r2={r2}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ManifoldModel::Torus { .. } | ManifoldModel::Henneberg => 3,
            ManifoldModel::Klein | ManifoldModel::Projective => 4,
            ManifoldModel::Linkage => 6,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            ManifoldModel::Torus { r1, r2 } => format!("manifold/torus({r1},{r2})"),
            ManifoldModel::Klein => "manifold/klein".into(),
            ManifoldModel::Projective => "manifold/projective".into(),
            ManifoldModel::Henneberg => "manifold/henneberg".into(),
            ManifoldModel::Linkage => "manifold/linkage".into(),
        }
    }

    /// The embedding evaluated at parameters `(phi, theta)`. Not defined for
    /// the projective plane (which is parametrized by the unit sphere) or the
    /// linkage (which has a discrete reflection choice).
    pub fn embed(&self, phi: f64, theta: f64) -> Option<Vec<f64>> {
        match *self {
            ManifoldModel::Torus { r1, r2 } => {
                let ring = r1 + r2 * phi.cos();
                Some(vec![ring * theta.cos(), ring * theta.sin(), r2 * phi.sin()])
            }
            ManifoldModel::Klein => {
                let ring = 1.0 + theta.cos();
                Some(vec![
                    ring * phi.cos(),
                    ring * phi.sin(),
                    theta.sin() * (phi / 2.0).cos(),
                    theta.sin() * (phi / 2.0).sin(),
                ])
            }
            ManifoldModel::Henneberg => Some(vec![
                2.0 * theta.cos() * phi.sinh() - 2.0 / 3.0 * (3.0 * theta).cos() * (3.0 * phi).sinh(),
                2.0 * theta.sin() * phi.sinh() + 2.0 / 3.0 * (3.0 * theta).sin() * (3.0 * phi).sinh(),
                2.0 * (2.0 * theta).cos() * (2.0 * phi).cosh(),
            ]),
            ManifoldModel::Projective | ManifoldModel::Linkage => None,
        }
    }
}

/// Veronese-type image of a unit vector `(u, v, w)` in R^4.
pub(crate) fn projective_image(u: f64, v: f64, w: f64) -> [f64; 4] {
    [u * v, u * w, v * v - w * w, 2.0 * v * w]
}

/// One linkage proposal from angles `(phi, theta)` and reflection sign.
///
/// Returns `Err(dist)` with `‖p3 − p5‖` when no closing vertex exists.
pub fn linkage_proposal(phi: f64, theta: f64, sign: f64) -> std::result::Result<[f64; 6], f64> {
    let p5 = [phi.cos(), phi.sin()];
    let p3 = [1.0 + theta.cos(), theta.sin()];
    let dist = ((p3[0] - p5[0]).powi(2) + (p3[1] - p5[1]).powi(2)).sqrt();
    if dist > 2.0 {
        return Err(dist);
    }
    let q = [(p3[0] + p5[0]) / 2.0, (p3[1] + p5[1]) / 2.0];
    let half = dist / 2.0;
    let p4 = if half == 0.0 {
        // p3 == p5: any unit vector works; pick the one normal to p5.
        [p5[0] - sign * p5[1], p5[1] + sign * p5[0]]
    } else {
        let h = (1.0 - half * half).max(0.0).sqrt();
        let s = sign * h / half;
        [q[0] + s * (p5[1] - q[1]), q[1] + s * (q[0] - p5[0])]
    };
    Ok([p3[0], p3[1], p4[0], p4[1], p5[0], p5[1]])
}

/// Samples a manifold model, also returning the parameters behind each point
/// (`(phi, theta)` or, for the projective plane, `(u, v, w)` packed as
/// `[u, v, w]`; for the linkage `[phi, theta, sign]`).
pub fn sample_manifold_with_params(
    model: &ManifoldModel,
    n: usize,
    seed: u64,
) -> Result<(PointCloud, Vec<Vec<f64>>)> {
    model.validate()?;
    check_count(n)?;
    let tag = model.tag();
    let mut rng = rng::stream(seed, &tag);
    let mut coords = Vec::with_capacity(n * model.ambient_dim());
    let mut params = Vec::with_capacity(n);

    for _ in 0..n {
        match model {
            ManifoldModel::Projective => {
                let (u, v, w) = loop {
                    let g: [f64; 3] = [
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    ];
                    let r = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                    if r > 0.0 {
                        break (g[0] / r, g[1] / r, g[2] / r);
                    }
                };
                coords.extend(projective_image(u, v, w));
                params.push(vec![u, v, w]);
            }
            ManifoldModel::Linkage => {
                let mut accepted = None;
                for _ in 0..MAX_REJECTION_ATTEMPTS {
                    let phi = rng.random_range(0.0..=TAU);
                    let theta = rng.random_range(0.0..=TAU);
                    if let Ok(x) = linkage_proposal(phi, theta, 1.0) {
                        // Dedicated draw for the reflection, taken only on acceptance.
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        let x = if sign > 0.0 { x } else { linkage_proposal(phi, theta, sign).unwrap_or(x) };
                        accepted = Some((x, vec![phi, theta, sign]));
                        break;
                    }
                }
                let (x, p) = accepted.ok_or_else(|| {
                    Error::param("linkage rejection sampling exceeded the attempt cap")
                })?;
                coords.extend(x);
                params.push(p);
            }
            _ => {
                let phi = rng.random_range(0.0..=TAU);
                let theta = rng.random_range(0.0..=TAU);
                coords.extend(model.embed(phi, theta).expect("parametrized model"));
                params.push(vec![phi, theta]);
            }
        }
    }
    let cloud = PointCloud::from_flat(coords, model.ambient_dim(), tag, seed, Some(2))?;
    Ok((cloud, params))
}

pub fn sample_manifold(model: &ManifoldModel, n: usize, seed: u64) -> Result<PointCloud> {
    sample_manifold_with_params(model, n, seed).map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn torus_points_satisfy_implicit_equation() {
        let c = sample_manifold(&ManifoldModel::Torus { r1: 2.0, r2: 1.0 }, 500, 3).unwrap();
        for p in c.points() {
            let ring = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!(((ring - 2.0).powi(2) + p[2] * p[2] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn torus_parameters_recovered_from_points() {
        let model = ManifoldModel::Torus { r1: 2.0, r2: 1.0 };
        let c = sample_manifold(&model, 300, 4).unwrap();
        for p in c.points() {
            let theta = p[1].atan2(p[0]);
            let phi = p[2].atan2((p[0] * p[0] + p[1] * p[1]).sqrt() - 2.0);
            assert!(max_abs_diff(&model.embed(phi, theta).unwrap(), p) < 1e-10);
        }
    }

    #[test]
    fn klein_parameters_recovered_from_points() {
        let c = sample_manifold(&ManifoldModel::Klein, 300, 5).unwrap();
        for p in c.points() {
            let ring = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let cos_t = ring - 1.0;
            let sin_abs = (p[2] * p[2] + p[3] * p[3]).sqrt();
            let phi0 = p[1].atan2(p[0]);
            // (phi, sinθ) and (phi + 2π, −sinθ) describe the same point.
            let best = [phi0, phi0 + TAU]
                .iter()
                .flat_map(|&phi| {
                    [sin_abs, -sin_abs].map(|s| {
                        let theta = s.atan2(cos_t);
                        max_abs_diff(&ManifoldModel::Klein.embed(phi, theta).unwrap(), p)
                    })
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "residual {best}");
        }
    }

    #[test]
    fn projective_points_invert_through_the_sphere() {
        let c = sample_manifold(&ManifoldModel::Projective, 300, 9).unwrap();
        for p in c.points() {
            // (v + iw)^2 = x3 + i x4 and v^2 + w^2 = 1 − u^2.
            let r = (p[2] * p[2] + p[3] * p[3]).sqrt();
            let u = (1.0 - r).max(0.0).sqrt();
            let (mut v, mut w) = {
                let m = r.sqrt();
                let arg = p[3].atan2(p[2]) / 2.0;
                (m * arg.cos(), m * arg.sin())
            };
            if p[0] * v + p[1] * w < 0.0 {
                v = -v;
                w = -w;
            }
            let back = projective_image(u, v, w);
            assert!(max_abs_diff(&back, p) < 1e-10, "{p:?} vs {back:?}");
        }
    }

    #[test]
    fn henneberg_matches_recorded_parameters() {
        let (c, params) = sample_manifold_with_params(&ManifoldModel::Henneberg, 200, 6).unwrap();
        for (p, q) in c.points().zip(&params) {
            let e = ManifoldModel::Henneberg.embed(q[0], q[1]).unwrap();
            let scale = p.iter().map(|x| x.abs()).fold(1.0, f64::max);
            assert!(max_abs_diff(&e, p) <= 1e-10 * scale);
        }
    }

    #[test]
    fn linkage_edges_have_unit_length() {
        let c = sample_manifold(&ManifoldModel::Linkage, 200, 5).unwrap();
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        for p in c.points() {
            let verts = [[0.0, 0.0], [1.0, 0.0], [p[0], p[1]], [p[2], p[3]], [p[4], p[5]]];
            for i in 0..5 {
                let len = d(verts[i], verts[(i + 1) % 5]);
                assert!((len - 1.0).abs() < 1e-10, "edge {i} has length {len}");
            }
        }
    }

    #[test]
    fn linkage_rejects_only_unclosable_angles() {
        let mut rng = rng::stream(5, "linkage-proposals");
        let mut rejected = 0;
        for _ in 0..2000 {
            let phi = rng.random_range(0.0..=TAU);
            let theta = rng.random_range(0.0..=TAU);
            match linkage_proposal(phi, theta, 1.0) {
                Err(dist) => {
                    rejected += 1;
                    assert!(dist > 2.0);
                }
                Ok(x) => {
                    let gap = ((x[0] - x[4]).powi(2) + (x[1] - x[5]).powi(2)).sqrt();
                    assert!(gap <= 2.0);
                }
            }
        }
        assert!(rejected > 0);
    }

    #[test]
    fn torus_validation() {
        assert!(sample_manifold(&ManifoldModel::Torus { r1: 1.0, r2: 2.0 }, 10, 0).is_err());
        assert!(sample_manifold(&ManifoldModel::Torus { r1: 1.0, r2: 0.0 }, 10, 0).is_err());
    }
}
