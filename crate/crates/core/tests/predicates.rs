//! Orientation and in-sphere signs against exact rational determinants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use unipers::filtration::geometry::{in_sphere, orient};

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn det(m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigRational::zero();
    for col in 0..n {
        let minor: Vec<Vec<BigRational>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, v)| v.clone()).collect()).collect();
        let term = &m[0][col] * det(minor);
        total = if col % 2 == 0 { total + term } else { total - term };
    }
    total
}

fn sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn fsign(x: f64) -> i32 {
    if x == 0.0 {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Rows `p_i − last` (plus the squared norm when `lift`), exactly.
fn rows(points: &[Vec<f64>], lift: bool) -> Vec<Vec<BigRational>> {
    let last: Vec<BigRational> = points.last().unwrap().iter().map(|&x| q(x)).collect();
    points[..points.len() - 1]
        .iter()
        .map(|p| {
            let mut r: Vec<BigRational> = p.iter().zip(&last).map(|(&x, l)| q(x) - l).collect();
            if lift {
                let s = r.iter().fold(BigRational::zero(), |acc, v| acc + v * v);
                r.push(s);
            }
            r
        })
        .collect()
}

/// Coordinates on a coarse decimal grid (inexact in binary), optionally
/// nudged by a few ulps, so ties and near-ties are common. The grid sits
/// away from zero: the adaptive predicates assume no underflow.
fn coord() -> impl Strategy<Value = f64> {
    (0i32..6, -2i64..=2).prop_map(|(g, ulps)| {
        let x = 1.0 + g as f64 * 0.1;
        f64::from_bits((x.to_bits() as i64 + ulps) as u64)
    })
}

fn points(n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(coord(), dim), n)
}

fn refs(p: &[Vec<f64>]) -> Vec<&[f64]> {
    p.iter().map(Vec::as_slice).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn orient2d_sign_is_exact(p in points(3, 2)) {
        // (b − a) × (c − a) has the sign of det[a − c; b − c].
        prop_assert_eq!(fsign(orient(&refs(&p))), sign(&det(rows(&p, false))));
    }

    #[test]
    fn orient3d_sign_is_exact(p in points(4, 3)) {
        prop_assert_eq!(fsign(orient(&refs(&p))), sign(&det(rows(&p, false))));
    }

    #[test]
    fn incircle_sign_is_exact(p in points(4, 2)) {
        let expected = sign(&det(rows(&p, true)));
        prop_assert_eq!(fsign(in_sphere(&refs(&p[..3]), &p[3])), expected);
    }

    #[test]
    fn insphere_sign_is_exact(p in points(5, 3)) {
        let expected = sign(&det(rows(&p, true)));
        prop_assert_eq!(fsign(in_sphere(&refs(&p[..4]), &p[4])), expected);
    }
}

#[test]
fn the_determinant_helper_is_right() {
    let m = |v: &[&[i64]]| v.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    assert_eq!(det(m(&[&[2, 0], &[0, 3]])), BigRational::from_integer(6.into()));
    assert_eq!(det(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])), BigRational::from_integer((-3).into()));
}
