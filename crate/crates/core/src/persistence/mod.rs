//! Persistence pairs and diagrams.

mod cohomology;
mod reduce;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{Filtration, NeighborGraph};

pub use reduce::{reduce_naive, reduce_twist, Pairs};

/// A persistence interval with values; `death` is infinite for classes that
/// survive to the end of the filtration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

/// Maps a pairing to filtration values, ordered by degree, birth, death.
pub fn intervals(f: &Filtration, pairs: &Pairs) -> Vec<Interval> {
    let s = f.simplices();
    let mut out: Vec<Interval> = pairs
        .finite
        .iter()
        .map(|&(b, d)| Interval { dim: s[b as usize].dim(), birth: s[b as usize].value, death: s[d as usize].value })
        .chain(pairs.essential.iter().map(|&b| Interval {
            dim: s[b as usize].dim(),
            birth: s[b as usize].value,
            death: f64::INFINITY,
        }))
        .collect();
    out.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death)));
    out
}

/// Intervals of an explicit filtration in the given degrees (twist reduction).
pub fn filtration_intervals(f: &Filtration, degrees: &[usize]) -> Result<Vec<Interval>> {
    Ok(intervals(f, &reduce_twist(f, degrees)?))
}

/// Rips intervals in degrees `0..=max_degree` (at most 2) straight from a
/// neighbour graph, without building the filtration.
pub fn rips_intervals(graph: &NeighborGraph, max_degree: usize) -> Result<Vec<Interval>> {
    cohomology::rips_intervals(graph, max_degree)
}

/// Degree-k diagram of one filtration run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub k: usize,
    /// `(birth, death)` with `death = f64::INFINITY` for unresolved classes.
    pub pairs: Vec<(f64, f64)>,
    pub tau: f64,
    pub n_points: usize,
}

/// Degree-`k` diagram with zero-persistence pairs removed, in
/// `(birth, death)` order (stable for ties).
pub fn extract_diagram(intervals: &[Interval], k: usize, tau: f64, n_points: usize) -> Result<PersistenceDiagram> {
    if k == 0 {
        return Err(Error::UnsupportedDegree(0));
    }
    let mut pairs: Vec<(f64, f64)> = intervals
        .iter()
        .filter(|i| i.dim == k && i.death > i.birth)
        .map(|i| (i.birth, i.death))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(PersistenceDiagram { k, pairs, tau, n_points })
}

impl PersistenceDiagram {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn n_infinite(&self) -> usize {
        self.pairs.iter().filter(|p| p.1.is_infinite()).count()
    }

    pub fn finite(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pairs.iter().copied().filter(|p| p.1.is_finite())
    }

    /// Copy without the unresolved (infinite) pairs.
    pub fn finite_part(&self) -> PersistenceDiagram {
        PersistenceDiagram { pairs: self.finite().collect(), ..self.clone() }
    }

    /// CSV with header `k,birth,death`; infinite deaths are written `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,birth,death\n");
        for &(b, d) in &self.pairs {
            if d.is_finite() {
                let _ = writeln!(out, "{},{},{}", self.k, b, d);
            } else {
                let _ = writeln!(out, "{},{},inf", self.k, b);
            }
        }
        out
    }

    /// Parses [`to_csv`](Self::to_csv) output. `tau` and `n_points` are not
    /// stored in the CSV and must be supplied.
    pub fn from_csv(text: &str, tau: f64, n_points: usize) -> Result<Self> {
        let mut k = None;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with('k')) {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 3 {
                return Err(parse_err("expected k,birth,death"));
            }
            let kk: usize = cells[0].parse().map_err(|_| parse_err("degree must be an integer"))?;
            if *k.get_or_insert(kk) != kk {
                return Err(parse_err("mixed degrees in one diagram"));
            }
            let b: f64 = cells[1].parse().map_err(|_| parse_err("birth must be a number"))?;
            let d: f64 = if cells[2] == "inf" {
                f64::INFINITY
            } else {
                cells[2].parse().map_err(|_| parse_err("death must be a number or inf"))?
            };
            pairs.push((b, d));
        }
        let k = k.ok_or_else(|| Error::input("diagram CSV has no rows"))?;
        Ok(PersistenceDiagram { k, pairs, tau, n_points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;
    use crate::filtration::{build_rips, pairwise_distances};

    fn square() -> PointCloud {
        PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], "t", 0, None).unwrap()
    }

    fn rips_diagram(c: &PointCloud, tau: f64, k: usize) -> PersistenceDiagram {
        let f = build_rips(&pairwise_distances(c), tau, k + 1);
        extract_diagram(&filtration_intervals(&f, &[k]).unwrap(), k, tau, c.len()).unwrap()
    }

    #[test]
    fn unit_square_diagrams() {
        let r2 = 2f64.sqrt();
        assert_eq!(rips_diagram(&square(), 1.5, 1).pairs, vec![(1.0, r2)]);
        assert_eq!(rips_diagram(&square(), 1.2, 1).pairs, vec![(1.0, f64::INFINITY)]);
    }

    #[test]
    fn equilateral_triangle_has_empty_diagram() {
        let h = 3f64.sqrt() / 2.0;
        let c = PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], "t", 0, None).unwrap();
        assert!(rips_diagram(&c, 1.0 + 1e-12, 1).is_empty());
    }

    #[test]
    fn extraction_rules() {
        let iv = [
            Interval { dim: 1, birth: 1.0, death: 1.0 },
            Interval { dim: 1, birth: 1.0, death: f64::INFINITY },
            Interval { dim: 2, birth: 0.5, death: 0.7 },
        ];
        let d = extract_diagram(&iv, 1, 2.0, 10).unwrap();
        assert_eq!(d.pairs, vec![(1.0, f64::INFINITY)]);
        assert_eq!(d.n_infinite(), 1);
        assert!(matches!(extract_diagram(&iv, 0, 2.0, 10), Err(Error::UnsupportedDegree(0))));
    }

    #[test]
    fn csv_round_trip() {
        let d = PersistenceDiagram { k: 1, pairs: vec![(0.1, 0.25), (0.2, f64::INFINITY)], tau: 1.0, n_points: 5 };
        let csv = d.to_csv();
        assert_eq!(csv, "k,birth,death\n1,0.1,0.25\n1,0.2,inf\n");
        assert_eq!(PersistenceDiagram::from_csv(&csv, 1.0, 5).unwrap(), d);
        assert!(matches!(PersistenceDiagram::from_csv("k,birth,death\n1,x,2\n", 1.0, 5), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn cohomology_engine_matches_twist_on_the_square() {
        let g = NeighborGraph::from_cloud(&square(), 1.5);
        let implicit = rips_intervals(&g, 1).unwrap();
        let f = build_rips(&pairwise_distances(&square()), 1.5, 2);
        let explicit = filtration_intervals(&f, &[0, 1]).unwrap();
        assert_eq!(implicit, explicit);
    }
}
