use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use super::check_count;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

/// How a triangle is chosen before a uniform point is placed inside it.
///
/// `AreaProportional` gives a uniform sample of the surface. `InverseArea`
/// follows the literal "inversely proportional to the area" recipe and
/// oversamples small triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshWeighting {
    #[default]
    AreaProportional,
    InverseArea,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&v| v >= vertices.len())) {
            return Err(Error::input(format!(
                "triangle {t:?} references a vertex beyond the {} given",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::input("mesh has a non-finite vertex coordinate"));
        }
        Ok(Self { vertices, triangles })
    }

    /// Parses ASCII OFF. Polygonal faces with more than three vertices are
    /// fan-triangulated; `#` starts a comment.
    pub fn from_off(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

        let (line, header) = lines.next().ok_or_else(|| Error::input("empty OFF file"))?;
        let mut counts_inline = None;
        if let Some(rest) = header.strip_prefix("OFF") {
            if !rest.trim().is_empty() {
                counts_inline = Some((line, rest.trim()));
            }
        } else {
            return Err(parse_err(line, "missing OFF header"));
        }
        let (cline, counts) = match counts_inline {
            Some(c) => c,
            None => lines.next().ok_or_else(|| Error::input("OFF file has no counts line"))?,
        };
        let nums: Vec<usize> = counts
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(cline, "counts line must hold integers"))?;
        if nums.len() < 2 {
            return Err(parse_err(cline, "counts line needs vertex and face counts"));
        }
        let (nv, nf) = (nums[0], nums[1]);

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (l, s) = lines.next().ok_or_else(|| Error::input("OFF file ends inside the vertex list"))?;
            let c: Vec<f64> = s
                .split_whitespace()
                .take(3)
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(l, "vertex coordinates must be numbers"))?;
            if c.len() != 3 {
                return Err(parse_err(l, "vertex needs three coordinates"));
            }
            vertices.push([c[0], c[1], c[2]]);
        }
        let mut triangles = Vec::with_capacity(nf);
        for _ in 0..nf {
            let (l, s) = lines.next().ok_or_else(|| Error::input("OFF file ends inside the face list"))?;
            let idx: Vec<usize> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(l, "face entries must be nonnegative integers"))?;
            let k = *idx.first().ok_or_else(|| parse_err(l, "empty face line"))?;
            if k < 3 || idx.len() < k + 1 {
                return Err(parse_err(l, "face needs at least three vertex indices"));
            }
            let f = &idx[1..=k];
            for j in 1..k - 1 {
                triangles.push([f[0], f[j], f[j + 1]]);
            }
        }
        Self::new(vertices, triangles)
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let cross = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        0.5 * (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt()
    }
}

pub fn sample_mesh(mesh: &TriangleMesh, weighting: MeshWeighting, n: usize, seed: u64) -> Result<PointCloud> {
    check_count(n)?;
    let weights: Vec<f64> = (0..mesh.triangles.len())
        .map(|t| {
            let a = mesh.area(t);
            match (a > 0.0, weighting) {
                (false, _) => 0.0,
                (true, MeshWeighting::AreaProportional) => a,
                (true, MeshWeighting::InverseArea) => 1.0 / a,
            }
        })
        .collect();
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(Error::input("mesh has no triangle with positive area"));
    }
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::input(e.to_string()))?;
    let tag = match weighting {
        MeshWeighting::AreaProportional => "mesh/area",
        MeshWeighting::InverseArea => "mesh/inverse-area",
    };
    let mut rng = rng::stream(seed, tag);
    let mut coords = Vec::with_capacity(3 * n);
    for _ in 0..n {
        let [a, b, c] = mesh.triangles[pick.sample(&mut rng)].map(|v| mesh.vertices[v]);
        let s = rng.random::<f64>().sqrt();
        let r = rng.random::<f64>();
        let (wa, wb, wc) = (1.0 - s, s * (1.0 - r), s * r);
        coords.extend((0..3).map(|i| wa * a[i] + wb * b[i] + wc * c[i]));
    }
    PointCloud::from_flat(coords, 3, tag, seed, Some(2))
}
