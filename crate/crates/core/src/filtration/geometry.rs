//! Circumspheres and exact orientation / in-sphere predicates.

use robust::{Coord, Coord3D};

/// Smallest sphere through `points` (at most `dim + 1` of them, each with
/// `dim` coordinates), i.e. the circumsphere within their affine hull.
/// Returns the centre and squared radius, or `None` if the points are
/// affinely dependent.
pub fn circumsphere(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    solve_circumsphere(points, 1e-10)
}

/// [`circumsphere`] for point sets already known to be affinely independent,
/// such as Delaunay simplices certified by the exact predicates. Thin slivers
/// near the hull are kept; only an exactly singular system gives `None`.
pub fn simplex_circumsphere(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    solve_circumsphere(points, 0.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Centre offset from the first point. `tol` bounds how close to singular
/// (relative to the edge lengths) the system may be.
fn solve_circumsphere(points: &[&[f64]], tol: f64) -> Option<(Vec<f64>, f64)> {
    let base = points.first()?;
    let dim = base.len();
    let k = points.len() - 1;
    if k == 0 {
        return Some((base.to_vec(), 0.0));
    }
    let u: Vec<Vec<f64>> = points[1..].iter().map(|p| p.iter().zip(base.iter()).map(|(x, y)| x - y).collect()).collect();
    let offset = match (k, dim) {
        (1, _) => (dot(&u[0], &u[0]) > 0.0).then(|| u[0].iter().map(|x| x / 2.0).collect())?,
        (k, d) if k == d => square_solve(&u, tol)?,
        (2, 3) => triangle_in_space(&u[0], &u[1], tol)?,
        _ => gram_solve(&u, tol * tol)?,
    };
    let r2 = dot(&offset, &offset);
    if !r2.is_finite() {
        return None;
    }
    let center = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
    Some((center, r2))
}

/// Solves `u_i · c = |u_i|²/2` for a full-dimensional simplex.
fn square_solve(u: &[Vec<f64>], tol: f64) -> Option<Vec<f64>> {
    let k = u.len();
    let mut m: Vec<Vec<f64>> = u
        .iter()
        .map(|r| {
            let mut row = r.clone();
            row.push(dot(r, r) / 2.0);
            row
        })
        .collect();
    let scale = u.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col] == 0.0 || m[piv][col].abs() <= tol * scale {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..k {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=k {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let rest: f64 = (i + 1..k).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][k] - rest) / m[i][i];
    }
    Some(x)
}

/// Circumcentre offset `((|a|²b − |b|²a) × (a × b)) / (2|a × b|²)`.
fn triangle_in_space(a: &[f64], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let cross = |p: &[f64], q: &[f64]| [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    let w = cross(a, b);
    let w2 = dot(&w, &w);
    let (a2, b2) = (dot(a, a), dot(b, b));
    if w2 == 0.0 || w2.sqrt() <= tol * (a2 * b2).sqrt() {
        return None;
    }
    let t: Vec<f64> = (0..3).map(|i| a2 * b[i] - b2 * a[i]).collect();
    Some(cross(&t, &w).iter().map(|x| x / (2.0 * w2)).collect())
}

/// Gram system `G λ = b` with `G_ij = u_i·u_j`, `b_i = |u_i|²/2`, for
/// simplices of lower dimension than the ambient space.
fn gram_solve(u: &[Vec<f64>], tol: f64) -> Option<Vec<f64>> {
    let k = u.len();
    let g: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| dot(&u[i], &u[j])).collect()).collect();
    let rhs: Vec<f64> = (0..k).map(|i| g[i][i] / 2.0).collect();
    let mut m: Vec<Vec<f64>> = g.iter().zip(&rhs).map(|(row, r)| row.iter().copied().chain([*r]).collect()).collect();
    let scale = rhs.iter().copied().fold(0.0, f64::max);
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col] == 0.0 || m[piv][col].abs() <= tol * scale {
            return None;
        }
        m.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=k {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..k).map(|i| m[i][k] / m[i][i]).collect();
    Some((0..u[0].len()).map(|c| (0..k).map(|i| lambda[i] * u[i][c]).sum()).collect())
}

/// Radius of [`circumsphere`].
pub fn circumradius(points: &[&[f64]]) -> Option<f64> {
    circumsphere(points).map(|(_, r2)| r2.sqrt())
}

/// Squared distance between two points.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Radius of the smallest ball containing `points`, found by brute force over
/// the circumspheres of all their subsets. Meant for small sets.
pub fn min_enclosing_radius(points: &[&[f64]]) -> f64 {
    let m = points.len();
    if m <= 1 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        let sub: Vec<&[f64]> = (0..m).filter(|&i| mask & (1 << i) != 0).map(|i| points[i]).collect();
        let Some((c, r2)) = circumsphere(&sub) else { continue };
        if r2.sqrt() >= best {
            continue;
        }
        let slack = r2 * (1.0 + 1e-10) + 1e-300;
        if points.iter().all(|p| dist2(p, &c) <= slack) {
            best = r2.sqrt();
        }
    }
    best
}

pub(crate) fn c2(p: &[f64]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

pub(crate) fn c3(p: &[f64]) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Exact orientation sign of a full-dimensional simplex in R^2 or R^3.
/// Positive means counterclockwise in the plane and, in space, that the
/// last point lies below the oriented plane of the first three.
pub fn orient(p: &[&[f64]]) -> f64 {
    match p.len() {
        3 => robust::orient2d(c2(p[0]), c2(p[1]), c2(p[2])),
        4 => robust::orient3d(c3(p[0]), c3(p[1]), c3(p[2]), c3(p[3])),
        n => panic!("orientation needs 3 or 4 points, got {n}"),
    }
}

/// Exact in-sphere sign: positive iff `q` lies strictly inside the sphere
/// through the positively oriented simplex `p`.
pub fn in_sphere(p: &[&[f64]], q: &[f64]) -> f64 {
    match p.len() {
        3 => robust::incircle(c2(p[0]), c2(p[1]), c2(p[2]), c2(q)),
        4 => robust::insphere(c3(p[0]), c3(p[1]), c3(p[2]), c3(p[3]), c3(q)),
        n => panic!("in-sphere needs 3 or 4 points, got {n}"),
    }
}
