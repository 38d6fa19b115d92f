use std::collections::HashMap;

use super::delaunay::delaunay;
use super::geometry::{dist2, min_enclosing_radius, simplex_circumsphere};
use super::{ComplexType, Filtration, Simplex, Vertices};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Delaunay–alpha filtration with radius values, truncated at `tau`.
///
/// A simplex gets the radius of its circumsphere unless a coface forces an
/// earlier or later entry: faces whose circumsphere contains the opposite
/// vertex of a coface (non-Gabriel faces) inherit that coface's value, and
/// every face is capped by its smallest coface value.
pub fn build_alpha(cloud: &PointCloud, tau: f64) -> Result<Filtration> {
    let dim = cloud.ambient_dim();
    if !(dim == 2 || dim == 3) {
        return Err(Error::param(format!("alpha complexes need points in 2 or 3 dimensions, got {dim}")));
    }
    if cloud.is_empty() {
        return Err(Error::input("alpha complex of an empty cloud"));
    }
    let (tops, duplicates) = match delaunay(cloud) {
        Ok(t) => (t.simplices, t.duplicates),
        Err(Error::Degenerate(msg)) => collinear_path(cloud).ok_or(Error::Degenerate(msg))?,
        Err(e) => return Err(e),
    };
    let top_dim = tops.iter().map(|s| s.len() - 1).max().unwrap_or(0);

    let mut value: HashMap<Vertices, f64> = HashMap::new();
    let mut by_dim: Vec<Vec<Vertices>> = vec![Vec::new(); top_dim + 1];
    for s in &tops {
        for mask in 1u32..(1 << s.len()) {
            if mask.count_ones() < 2 {
                continue;
            }
            let face: Vertices = (0..s.len()).filter(|&i| mask & (1 << i) != 0).map(|i| s[i]).collect();
            if !value.contains_key(&face) {
                by_dim[face.len() - 1].push(face.clone());
                value.insert(face, f64::NAN);
            }
        }
    }
    let pts = |s: &[u32]| -> Vec<&[f64]> { s.iter().map(|&v| cloud.point(v as usize)).collect() };
    for d in (1..=top_dim).rev() {
        by_dim[d].sort_unstable();
        for s in &by_dim[d] {
            let mut f = value[s];
            if f.is_nan() {
                f = simplex_circumsphere(&pts(s)).map(|(_, r2)| r2.sqrt()).ok_or_else(|| Error::Degenerate(format!("flat Delaunay simplex {s:?}")))?;
                value.insert(s.clone(), f);
            }
            if d == 1 {
                continue;
            }
            for skip in 0..s.len() {
                let face: Vertices = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                let current = value[&face];
                if !current.is_nan() {
                    if f < current {
                        value.insert(face, f);
                    }
                } else {
                    let (c, r2) = simplex_circumsphere(&pts(&face)).expect("face of a full-dimensional simplex");
                    if dist2(cloud.point(s[skip] as usize), &c) < r2 {
                        value.insert(face, f);
                    }
                }
            }
        }
    }

    let mut simplices: Vec<Simplex> = (0..cloud.len() as u32).map(|v| Simplex::new([v], 0.0)).collect();
    simplices.extend(value.into_iter().map(|(vertices, value)| Simplex { vertices, value }));
    simplices.extend(duplicates.iter().map(|&(p, twin)| Simplex::new([p, twin], 0.0)));
    Ok(Filtration::new(simplices, ComplexType::Alpha, tau, dim))
}

/// Delaunay "triangulation" of collinear points: the path through them in
/// order along the line. `None` unless all points are collinear.
#[allow(clippy::type_complexity)]
fn collinear_path(cloud: &PointCloud) -> Option<(Vec<Vertices>, Vec<(u32, u32)>)> {
    let a = cloud.point(0);
    let Some(b) = cloud.points().find(|p| *p != a) else {
        return Some((Vec::new(), (1..cloud.len() as u32).map(|v| (v, 0)).collect()));
    };
    let d = cloud.ambient_dim();
    for p in cloud.points() {
        for i in 0..d {
            for j in i + 1..d {
                let o = robust::orient2d(
                    robust::Coord { x: a[i], y: a[j] },
                    robust::Coord { x: b[i], y: b[j] },
                    robust::Coord { x: p[i], y: p[j] },
                );
                if o != 0.0 {
                    return None;
                }
            }
        }
    }
    let axis = (0..d).find(|&c| a[c] != b[c]).unwrap();
    let mut order: Vec<u32> = (0..cloud.len() as u32).collect();
    order.sort_by(|&x, &y| cloud.point(x as usize)[axis].total_cmp(&cloud.point(y as usize)[axis]).then(x.cmp(&y)));
    let mut edges = Vec::new();
    let mut dups = Vec::new();
    let mut prev = order[0];
    for &v in &order[1..] {
        if cloud.point(v as usize) == cloud.point(prev as usize) {
            dups.push((v, prev));
        } else {
            edges.push(Vertices::from_slice(&[prev.min(v), prev.max(v)]));
            prev = v;
        }
    }
    Some((edges, dups))
}

/// Čech filtration by brute force: every vertex set of at most
/// `max_dim + 1` points, valued by the radius of its smallest enclosing
/// ball. Exponential in `max_dim`; meant as a reference on small clouds.
pub fn build_cech(cloud: &PointCloud, tau: f64, max_dim: usize) -> Filtration {
    let n = cloud.len() as u32;
    let mut simplices = Vec::new();
    let mut stack: Vec<Vertices> = (0..n).map(|v| Vertices::from_slice(&[v])).collect();
    while let Some(s) = stack.pop() {
        let pts: Vec<&[f64]> = s.iter().map(|&v| cloud.point(v as usize)).collect();
        let r = min_enclosing_radius(&pts);
        if r > tau {
            continue;
        }
        if s.len() <= max_dim {
            for w in s[s.len() - 1] + 1..n {
                let mut t = s.clone();
                t.push(w);
                stack.push(t);
            }
        }
        simplices.push(Simplex { vertices: s, value: r });
    }
    Filtration::new(simplices, ComplexType::Cech, tau, max_dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(points: &[Vec<f64>]) -> PointCloud {
        PointCloud::from_points(points, "t", 0, None).unwrap()
    }

    #[test]
    fn equilateral_triangle_values() {
        let s = 1.5;
        let c = cloud(&[vec![0.0, 0.0], vec![s, 0.0], vec![s / 2.0, s * 3f64.sqrt() / 2.0]]);
        let f = build_alpha(&c, f64::INFINITY).unwrap();
        f.validate().unwrap();
        let edges: Vec<f64> = f.simplices().iter().filter(|x| x.dim() == 1).map(|x| x.value).collect();
        assert_eq!(edges.len(), 3);
        assert!(edges.iter().all(|&e| (e - s / 2.0).abs() < 1e-14));
        let tri = f.simplices().last().unwrap();
        assert!((tri.value - s / 3f64.sqrt()).abs() < 1e-14);
        // The closed-form values also come out of the brute-force Čech construction.
        let cech = build_cech(&c, f64::INFINITY, 2);
        assert_eq!(cech.simplices().last().unwrap().value, tri.value);
    }

    #[test]
    fn two_points_one_edge() {
        let c = cloud(&[vec![0.0, 0.0], vec![1.0, 0.0]]);
        let f = build_alpha(&c, 10.0).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.simplices()[2].value, 0.5);
    }

    #[test]
    fn obtuse_triangle_long_edge_inherits_triangle_value() {
        let c = cloud(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]]);
        let f = build_alpha(&c, f64::INFINITY).unwrap();
        f.validate().unwrap();
        let long = f.simplices().iter().find(|s| s.vertices.as_slice() == [0, 1]).unwrap();
        let tri = f.simplices().iter().find(|s| s.dim() == 2).unwrap();
        assert_eq!(long.value, tri.value);
        assert!(long.value > 2.0);
    }

    #[test]
    fn duplicates_enter_at_zero() {
        let c = cloud(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]]);
        let f = build_alpha(&c, f64::INFINITY).unwrap();
        f.validate().unwrap();
        assert!(f.simplices().iter().any(|s| s.vertices.as_slice() == [2, 3] && s.value == 0.0));
    }

    #[test]
    fn collinear_points_form_a_path() {
        let c = cloud(&[vec![0.0, 0.0, 0.0], vec![2.0, 2.0, 2.0], vec![1.0, 1.0, 1.0]]);
        let f = build_alpha(&c, f64::INFINITY).unwrap();
        let edges: Vec<Vec<u32>> = f.simplices().iter().filter(|s| s.dim() == 1).map(|s| s.vertices.to_vec()).collect();
        assert_eq!(edges.len(), 2);
        assert!(edges.contains(&vec![0, 2]) && edges.contains(&vec![1, 2]));
    }

    #[test]
    fn truncation_and_monotonicity() {
        let pts: Vec<Vec<f64>> = (0..30).map(|i| {
            let t = i as f64 * 0.7;
            vec![t.cos() * (1.0 + 0.1 * (3.0 * t).sin()), t.sin()]
        }).collect();
        let c = cloud(&pts);
        let full = build_alpha(&c, f64::INFINITY).unwrap();
        full.validate().unwrap();
        let cut = build_alpha(&c, 0.3).unwrap();
        cut.validate().unwrap();
        for s in cut.simplices() {
            assert!(full.simplices().contains(s));
        }
    }
}
