use super::{ComplexType, DistanceMatrix, Filtration, NeighborGraph, Simplex, Vertices};

/// Top simplex dimension kept when the caller does not choose one
/// (homology up to degree 2).
pub const DEFAULT_RIPS_MAX_DIM: usize = 3;

/// Explicit Rips filtration: every clique of at most `max_dim + 1` vertices
/// whose diameter is at most `tau`, valued by its diameter.
pub fn build_rips(dm: &DistanceMatrix, tau: f64, max_dim: usize) -> Filtration {
    build_rips_from_graph(&NeighborGraph::from_matrix(dm, tau), max_dim)
}

pub(crate) fn build_rips_from_graph(graph: &NeighborGraph, max_dim: usize) -> Filtration {
    let mut out = Vec::new();
    let mut clique: Vertices = Vertices::new();
    for v in 0..graph.len() {
        out.push(Simplex::new([v as u32], 0.0));
        if max_dim == 0 {
            continue;
        }
        let cand: Vec<(u32, f64)> = graph.neighbors(v).iter().copied().filter(|&(w, _)| w as usize > v).collect();
        clique.clear();
        clique.push(v as u32);
        extend(graph, &mut clique, 0.0, &cand, max_dim, &mut out);
    }
    Filtration::new(out, ComplexType::Rips, graph.tau, max_dim)
}

/// `cand` holds the common higher-indexed neighbours of `clique`.
fn extend(
    graph: &NeighborGraph,
    clique: &mut Vertices,
    value: f64,
    cand: &[(u32, f64)],
    max_dim: usize,
    out: &mut Vec<Simplex>,
) {
    for (k, &(w, _)) in cand.iter().enumerate() {
        let value_w = clique
            .iter()
            .map(|&u| graph.distance(u, w).expect("candidate is adjacent to the clique"))
            .fold(value, f64::max);
        clique.push(w);
        out.push(Simplex { vertices: clique.clone(), value: value_w });
        if clique.len() <= max_dim {
            let nw = graph.neighbors(w as usize);
            let next: Vec<(u32, f64)> = cand[k + 1..]
                .iter()
                .copied()
                .filter(|&(x, _)| nw.binary_search_by_key(&x, |e| e.0).is_ok())
                .collect();
            if !next.is_empty() {
                extend(graph, clique, value_w, &next, max_dim, out);
            }
        }
        clique.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;
    use crate::filtration::pairwise_distances;

    fn dm(points: &[[f64; 2]]) -> DistanceMatrix {
        let pts: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
        pairwise_distances(&PointCloud::from_points(&pts, "t", 0, None).unwrap())
    }

    fn counts(f: &Filtration) -> Vec<usize> {
        (0..=f.max_dim).map(|d| f.count_dim(d)).collect()
    }

    #[test]
    fn unit_triangle() {
        // Side exactly 1 in x; the slanted sides are 1 up to rounding, so use
        // the distance matrix's own values.
        let h = 3f64.sqrt() / 2.0;
        let d = dm(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]);
        let tau = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| d.get(i, j)).fold(0.0, f64::max);
        let f = build_rips(&d, tau, 2);
        assert_eq!(counts(&f), vec![3, 3, 1]);
        assert_eq!(f.simplices().last().unwrap().value, tau);
        f.validate().unwrap();
    }

    #[test]
    fn unit_square_thresholds() {
        let d = dm(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let low = build_rips(&d, 1.2, 2);
        assert_eq!(counts(&low), vec![4, 4, 0]);
        assert!(low.simplices().iter().filter(|s| s.dim() == 1).all(|s| s.value == 1.0));
        let high = build_rips(&d, 1.5, 2);
        assert_eq!(counts(&high), vec![4, 6, 4]);
        let r2 = 2f64.sqrt();
        assert_eq!(high.simplices().iter().filter(|s| s.dim() == 1 && s.value == r2).count(), 2);
        assert!(high.simplices().iter().filter(|s| s.dim() == 2).all(|s| s.value == r2));
    }

    #[test]
    fn below_minimum_distance_only_vertices() {
        let d = dm(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        assert_eq!(counts(&build_rips(&d, 0.5, 2)), vec![3, 0, 0]);
    }
}
