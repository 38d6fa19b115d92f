use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_count, rejection};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

/// Planar regions sampled uniformly by area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarShape {
    /// Annulus around the origin with the strip `{x > 0, |y| < width/2}`
    /// removed. Contractible for any positive width.
    CutAnnulus { r_in: f64, r_out: f64, width: f64 },
    /// Two overlapping annuli centred at `(±(r_in + r_out)/2, 0)`. The wall
    /// between the two holes is opened by removing `|y| < gap/2` there, so a
    /// positive gap merges the holes into one.
    FigureEight { r_in: f64, r_out: f64, gap: f64 },
}

impl PlanarShape {
    pub fn validate(&self) -> Result<()> {
        let (r_in, r_out, w) = match *self {
            PlanarShape::CutAnnulus { r_in, r_out, width } => (r_in, r_out, width),
            PlanarShape::FigureEight { r_in, r_out, gap } => (r_in, r_out, gap),
        };
        if !(0.0 < r_in && r_in < r_out) {
            return Err(Error::param(format!("needs 0 < r_in < r_out, got {r_in}, {r_out}")));
        }
        if !(0.0..2.0 * r_out).contains(&w) {
            return Err(Error::param(format!("cut width {w} must lie in [0, 2 r_out)")));
        }
        Ok(())
    }

    pub fn tag(&self) -> String {
        match self {
            PlanarShape::CutAnnulus { r_in, r_out, width } => format!("planar/cut-annulus({r_in},{r_out},{width})"),
            PlanarShape::FigureEight { r_in, r_out, gap } => format!("planar/figure-eight({r_in},{r_out},{gap})"),
        }
    }

    /// Axis-aligned box `[x0, x1] × [y0, y1]` containing the region.
    fn bounds(&self) -> [f64; 4] {
        match *self {
            PlanarShape::CutAnnulus { r_out, .. } => [-r_out, r_out, -r_out, r_out],
            PlanarShape::FigureEight { r_in, r_out, .. } => {
                let c = (r_in + r_out) / 2.0;
                [-c - r_out, c + r_out, -r_out, r_out]
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let in_ring = |cx: f64, r_in: f64, r_out: f64| {
            let r = (x - cx).hypot(y);
            r_in <= r && r <= r_out
        };
        match *self {
            PlanarShape::CutAnnulus { r_in, r_out, width } => {
                in_ring(0.0, r_in, r_out) && !(x > 0.0 && y.abs() < width / 2.0)
            }
            PlanarShape::FigureEight { r_in, r_out, gap } => {
                let c = (r_in + r_out) / 2.0;
                let in_disk = |cx: f64| (x - cx).hypot(y) <= r_out;
                let in_hole = |cx: f64| (x - cx).hypot(y) < r_in;
                let in_neck = x.abs() < c - r_in && y.abs() < gap / 2.0;
                (in_disk(-c) || in_disk(c)) && !in_hole(-c) && !in_hole(c) && !in_neck
            }
        }
    }
}

pub fn sample_planar(shape: &PlanarShape, n: usize, seed: u64) -> Result<PointCloud> {
    shape.validate()?;
    check_count(n)?;
    let tag = shape.tag();
    let mut rng = rng::stream(seed, &tag);
    let [x0, x1, y0, y1] = shape.bounds();
    let mut coords = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let p = rejection(
            &mut rng,
            |r| vec![r.random_range(x0..=x1), r.random_range(y0..=y1)],
            |p| shape.contains(p[0], p[1]),
        )?;
        coords.extend(p);
    }
    PointCloud::from_flat(coords, 2, tag, seed, Some(2))
}

/// Mixture of the square `{(x, y, 0) : x, y ∈ [−1, 1]}` (weight `p_plane`) and
/// the cube `[−1, 1]^3`.
pub fn sample_stratified(p_plane: f64, n: usize, seed: u64) -> Result<PointCloud> {
    if !(0.0..=1.0).contains(&p_plane) {
        return Err(Error::param(format!("plane probability {p_plane} outside [0, 1]")));
    }
    check_count(n)?;
    let tag = format!("stratified({p_plane})");
    let mut rng = rng::stream(seed, &tag);
    let mut coords = Vec::with_capacity(3 * n);
    for _ in 0..n {
        let on_plane = rng.random::<f64>() < p_plane;
        let x = rng.random_range(-1.0..=1.0);
        let y = rng.random_range(-1.0..=1.0);
        let z = if on_plane { 0.0 } else { rng.random_range(-1.0..=1.0) };
        coords.extend([x, y, z]);
    }
    PointCloud::from_flat(coords, 3, tag, seed, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stratified_extremes_and_mixture() {
        let plane = sample_stratified(1.0, 100, 2).unwrap();
        assert!(plane.points().all(|p| p[2] == 0.0));
        let cube = sample_stratified(0.0, 100, 2).unwrap();
        assert_eq!(cube.points().filter(|p| p[2].abs() < 1e-9).count(), 0);
        let mix = sample_stratified(0.5, 10_000, 4).unwrap();
        let frac = mix.points().filter(|p| p[2] == 0.0).count() as f64 / 10_000.0;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
        assert!(sample_stratified(1.5, 10, 0).is_err());
    }

    #[test]
    fn cut_annulus_avoids_the_strip() {
        let shape = PlanarShape::CutAnnulus { r_in: 0.4, r_out: 1.0, width: 0.25 };
        let c = sample_planar(&shape, 2000, 1).unwrap();
        for p in c.points() {
            let r = p[0].hypot(p[1]);
            assert!((0.4..=1.0).contains(&r));
            assert!(!(p[0] > 0.0 && p[1].abs() < 0.125));
        }
        assert!(c.points().any(|p| p[0] > 0.0 && p[1].abs() < 0.2));
    }

    #[test]
    fn figure_eight_membership() {
        let closed = PlanarShape::FigureEight { r_in: 0.4, r_out: 1.0, gap: 0.0 };
        let open = PlanarShape::FigureEight { r_in: 0.4, r_out: 1.0, gap: 0.2 };
        // Hole centres, the wall between the holes, and the outer rim.
        assert!(!closed.contains(0.7, 0.0) && !closed.contains(-0.7, 0.0));
        assert!(closed.contains(0.0, 0.0) && !open.contains(0.0, 0.0));
        assert!(open.contains(0.0, 0.3) && open.contains(1.6, 0.0));
        assert!(!open.contains(1.8, 0.0));
        let c = sample_planar(&open, 500, 3).unwrap();
        assert!(c.points().all(|p| open.contains(p[0], p[1])));
    }

    #[test]
    fn invalid_shapes() {
        assert!(sample_planar(&PlanarShape::CutAnnulus { r_in: 1.0, r_out: 0.5, width: 0.1 }, 5, 0).is_err());
        assert!(sample_planar(&PlanarShape::CutAnnulus { r_in: 0.2, r_out: 0.5, width: -0.1 }, 5, 0).is_err());
    }
}
