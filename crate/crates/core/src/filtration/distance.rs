use crate::cloud::{euclidean, PointCloud};

/// Dense symmetric matrix of Euclidean distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from a full row-major buffer. Returns `None` unless the
    /// buffer is square, symmetric, nonnegative and zero on the diagonal.
    pub fn from_full(n: usize, data: Vec<f64>) -> Option<Self> {
        if data.len() != n * n {
            return None;
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return None;
            }
            for j in 0..i {
                let d = data[i * n + j];
                if !(d >= 0.0) || d != data[j * n + i] {
                    return None;
                }
            }
        }
        Some(Self { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn pairwise_distances(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let d = euclidean(cloud.point(j), cloud.point(i));
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix { n, data }
}

/// `min_i max_j d(i, j)`: beyond this radius the Rips complex is a cone.
pub fn enclosing_radius(dm: &DistanceMatrix) -> f64 {
    (0..dm.len())
        .map(|i| dm.row(i).iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// [`enclosing_radius`] without materializing the matrix.
pub fn enclosing_radius_of(cloud: &PointCloud) -> f64 {
    let n = cloud.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let mut far = 0.0f64;
        for j in 0..n {
            let (a, b) = if j < i { (j, i) } else { (i, j) };
            far = far.max(euclidean(cloud.point(a), cloud.point(b)));
            if far >= best {
                break;
            }
        }
        best = best.min(far);
    }
    if n == 0 {
        0.0
    } else {
        best
    }
}

/// Adjacency within a radius: for each vertex, the neighbours `j` with
/// `d(i, j) <= tau`, sorted by index, with their distances.
#[derive(Clone, Debug)]
pub struct NeighborGraph {
    pub tau: f64,
    adj: Vec<Vec<(u32, f64)>>,
}

impl NeighborGraph {
    pub fn from_cloud(cloud: &PointCloud, tau: f64) -> Self {
        let n = cloud.len();
        let mut adj = vec![Vec::new(); n];
        for j in 0..n {
            for i in 0..j {
                let d = euclidean(cloud.point(i), cloud.point(j));
                if d <= tau {
                    adj[i].push((j as u32, d));
                    adj[j].push((i as u32, d));
                }
            }
        }
        adj.iter_mut().for_each(|a| a.sort_by_key(|e| e.0));
        Self { tau, adj }
    }

    pub fn from_matrix(dm: &DistanceMatrix, tau: f64) -> Self {
        let adj = (0..dm.len())
            .map(|i| {
                dm.row(i)
                    .iter()
                    .enumerate()
                    .filter(|&(j, &d)| j != i && d <= tau)
                    .map(|(j, &d)| (j as u32, d))
                    .collect()
            })
            .collect();
        Self { tau, adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[(u32, f64)] {
        &self.adj[i]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn distance(&self, i: u32, j: u32) -> Option<f64> {
        let row = &self.adj[i as usize];
        row.binary_search_by_key(&j, |e| e.0).ok().map(|k| row[k].1)
    }
}
