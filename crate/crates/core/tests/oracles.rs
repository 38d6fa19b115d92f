//! Fast engines against slow references on small random clouds.

use proptest::prelude::*;
use unipers::filtration::{build_alpha, build_cech, build_rips, pairwise_distances, NeighborGraph};
use unipers::persistence::{intervals, reduce_naive, reduce_twist, rips_intervals, Interval};
use unipers::PointCloud;

fn cloud(coords: Vec<f64>, dim: usize) -> PointCloud {
    PointCloud::from_flat(coords, dim, "prop", 0, None).unwrap()
}

/// `n` points in `[0,1]^dim` for `n` in 6..=12 and dim in {2, 3}.
fn small_cloud() -> impl Strategy<Value = PointCloud> {
    (2usize..=3, 6usize..=12).prop_flat_map(|(dim, n)| {
        prop::collection::vec(0.0f64..1.0, n * dim).prop_map(move |c| cloud(c, dim))
    })
}

fn nontrivial(iv: &[Interval], k: usize) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = iv.iter().filter(|i| i.dim == k && i.birth < i.death).map(|i| (i.birth, i.death)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn twist_matches_naive_reduction(c in small_cloud()) {
        let dm = pairwise_distances(&c);
        let rips = build_rips(&dm, f64::INFINITY, c.ambient_dim());
        let alpha = build_alpha(&c, f64::INFINITY).unwrap();
        for f in [&rips, &alpha] {
            let naive = reduce_naive(f).unwrap();
            prop_assert_eq!(reduce_twist(f, &[]).unwrap(), naive.clone());
            for k in 1..=f.max_dim {
                prop_assert_eq!(reduce_twist(f, &[k]).unwrap(), naive.restrict(f, &[k]));
            }
        }
    }

    #[test]
    fn rips_cohomology_matches_naive_reduction(c in small_cloud(), cut in 0.3f64..2.0) {
        let dm = pairwise_distances(&c);
        let f = build_rips(&dm, cut, 3);
        let reference = intervals(&f, &reduce_naive(&f).unwrap());
        let fast = rips_intervals(&NeighborGraph::from_matrix(&dm, cut), 2).unwrap();
        for k in 0..=2 {
            let count = |iv: &[Interval]| iv.iter().filter(|i| i.dim == k && i.death.is_infinite()).count();
            prop_assert_eq!(nontrivial(&fast, k), nontrivial(&reference, k));
            prop_assert_eq!(count(&fast), count(&reference));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// Alpha and Čech filtrations have the same diagram.
    #[test]
    fn alpha_matches_brute_force_cech(coords in prop::collection::vec(0.0f64..1.0, 20)) {
        let c = cloud(coords, 2);
        let alpha = build_alpha(&c, f64::INFINITY).unwrap();
        let cech = build_cech(&c, f64::INFINITY, 3);
        let a = intervals(&alpha, &reduce_naive(&alpha).unwrap());
        let b = intervals(&cech, &reduce_naive(&cech).unwrap());
        prop_assert_eq!(nontrivial(&a, 1), nontrivial(&b, 1));
        prop_assert_eq!(nontrivial(&a, 0), nontrivial(&b, 0));
    }
}
