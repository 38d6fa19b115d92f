use crate::error::{Error, Result};

/// `n` points in R^D with the provenance needed to regenerate them.
///
/// Coordinates are stored row-major in one buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    ambient_dim: usize,
    pub model_tag: String,
    pub seed: u64,
    pub intrinsic_dim: Option<usize>,
}

impl PointCloud {
    /// Builds a cloud from a flat coordinate buffer. Rejects ragged buffers and
    /// non-finite coordinates.
    pub fn from_flat(
        coords: Vec<f64>,
        ambient_dim: usize,
        model_tag: impl Into<String>,
        seed: u64,
        intrinsic_dim: Option<usize>,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::param("ambient dimension must be positive"));
        }
        if coords.len() % ambient_dim != 0 {
            return Err(Error::input(format!(
                "{} coordinates do not split into points of dimension {}",
                coords.len(),
                ambient_dim
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!(
                "non-finite coordinate in point {}",
                pos / ambient_dim
            )));
        }
        Ok(Self {
            coords,
            ambient_dim,
            model_tag: model_tag.into(),
            seed,
            intrinsic_dim,
        })
    }

    pub fn from_points(
        points: &[Vec<f64>],
        model_tag: impl Into<String>,
        seed: u64,
        intrinsic_dim: Option<usize>,
    ) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::input("points have differing dimensions"));
        }
        let coords = points.iter().flatten().copied().collect();
        Self::from_flat(coords, dim, model_tag, seed, intrinsic_dim)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.ambient_dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coords.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// The sub-cloud made of the listed points, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.ambient_dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self {
            coords,
            ambient_dim: self.ambient_dim,
            model_tag: self.model_tag.clone(),
            seed: self.seed,
            intrinsic_dim: self.intrinsic_dim,
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }
}

/// Euclidean distance; symmetric bit-for-bit because the caller always orders
/// the arguments the same way for a given pair.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(PointCloud::from_flat(vec![0.0, 1.0, 2.0], 2, "t", 0, None).is_err());
        assert!(PointCloud::from_flat(vec![0.0, f64::NAN], 2, "t", 0, None).is_err());
        assert!(PointCloud::from_points(&[vec![0.0], vec![1.0, 2.0]], "t", 0, None).is_err());
    }

    #[test]
    fn accessors() {
        let c = PointCloud::from_points(&[vec![0.0, 0.0], vec![3.0, 4.0]], "t", 0, Some(2)).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[3.0, 4.0]);
        assert_eq!(c.distance(0, 1), 5.0);
        assert_eq!(c.scaled(2.0).distance(0, 1), 10.0);
    }
}
