use std::collections::BinaryHeap;

use crate::error::Result;
use crate::filtration::Filtration;

const NONE: u32 = u32::MAX;

/// A persistence pairing as filtration indices. `finite` holds
/// `(birth, death)` sorted by birth; `essential` holds the births of classes
/// that never die, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pairs {
    pub finite: Vec<(u32, u32)>,
    pub essential: Vec<u32>,
}

impl Pairs {
    /// Keeps only classes born in one of `degrees`.
    pub fn restrict(&self, f: &Filtration, degrees: &[usize]) -> Pairs {
        let keep = |i: u32| degrees.contains(&f.simplices()[i as usize].dim());
        Pairs {
            finite: self.finite.iter().copied().filter(|&(b, _)| keep(b)).collect(),
            essential: self.essential.iter().copied().filter(|&b| keep(b)).collect(),
        }
    }

    fn normalize(&mut self) {
        self.finite.sort_unstable();
        self.essential.sort_unstable();
    }
}

/// Pops the largest entry with odd multiplicity, discarding cancelled pairs.
fn pop_pivot(heap: &mut BinaryHeap<u32>) -> Option<u32> {
    while let Some(top) = heap.pop() {
        if heap.peek() == Some(&top) {
            heap.pop();
        } else {
            return Some(top);
        }
    }
    None
}

/// Column reduction over Z/2 with clearing. Dimensions are processed from
/// the top down, so a column whose simplex already appeared as a pivot is
/// known to reduce to zero and is skipped. Only the columns needed for the
/// requested homology degrees are reduced; an empty `degrees` means all.
pub fn reduce_twist(f: &Filtration, degrees: &[usize]) -> Result<Pairs> {
    let bd = f.boundaries()?;
    let n = f.len();
    let top = f.simplices().iter().map(|s| s.dim()).max().unwrap_or(0);
    let wanted: Vec<usize> = if degrees.is_empty() { (0..=top).collect() } else { degrees.to_vec() };
    let mut dims: Vec<usize> = wanted.iter().flat_map(|&k| [k, k + 1]).filter(|&d| d >= 1 && d <= top).collect();
    dims.sort_unstable();
    dims.dedup();

    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for (j, s) in f.simplices().iter().enumerate() {
        by_dim[s.dim()].push(j as u32);
    }
    let mut pivot_of = vec![NONE; n];
    let mut cleared = vec![false; n];
    let mut negative = vec![false; n];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut heap = BinaryHeap::new();
    let mut pairs = Pairs::default();

    for &d in dims.iter().rev() {
        for &j in &by_dim[d] {
            if cleared[j as usize] {
                continue;
            }
            heap.clear();
            heap.extend(bd[j as usize].iter().copied());
            while let Some(p) = pop_pivot(&mut heap) {
                let other = pivot_of[p as usize];
                if other == NONE {
                    let mut col = vec![p];
                    while let Some(x) = pop_pivot(&mut heap) {
                        col.push(x);
                    }
                    col.reverse();
                    reduced[j as usize] = col;
                    pivot_of[p as usize] = j;
                    cleared[p as usize] = true;
                    negative[j as usize] = true;
                    pairs.finite.push((p, j));
                    break;
                }
                // p cancels against the other column's pivot.
                let r = &reduced[other as usize];
                heap.extend(r[..r.len() - 1].iter().copied());
            }
        }
    }
    for &k in &wanted {
        if k > top {
            continue;
        }
        for &j in &by_dim[k] {
            if !negative[j as usize] && pivot_of[j as usize] == NONE {
                pairs.essential.push(j);
            }
        }
    }
    let mut pairs = pairs.restrict(f, &wanted);
    pairs.normalize();
    Ok(pairs)
}

/// Textbook left-to-right reduction without optimizations; the reference the
/// twist reduction is checked against.
pub fn reduce_naive(f: &Filtration) -> Result<Pairs> {
    let bd = f.boundaries()?;
    let n = f.len();
    let mut low_of = vec![NONE; n];
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut pairs = Pairs::default();
    let mut zero = vec![false; n];
    for j in 0..n {
        let mut col: Vec<u32> = bd[j].to_vec();
        while let Some(&low) = col.last() {
            let i = low_of[low as usize];
            if i == NONE {
                break;
            }
            col = symmetric_difference(&col, &cols[i as usize]);
        }
        match col.last() {
            Some(&low) => {
                low_of[low as usize] = j as u32;
                pairs.finite.push((low, j as u32));
            }
            None => zero[j] = true,
        }
        cols.push(col);
    }
    pairs.essential = (0..n as u32).filter(|&j| zero[j as usize] && low_of[j as usize] == NONE).collect();
    pairs.normalize();
    Ok(pairs)
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{ComplexType, Simplex};

    #[test]
    fn heap_cancellation() {
        let mut h: BinaryHeap<u32> = [3, 5, 5, 2, 3, 3].into_iter().collect();
        assert_eq!(pop_pivot(&mut h), Some(3));
        assert_eq!(pop_pivot(&mut h), Some(2));
        assert_eq!(pop_pivot(&mut h), None);
    }

    #[test]
    fn empty_and_vertex_only() {
        let empty = Filtration::new(Vec::new(), ComplexType::Rips, 1.0, 2);
        assert_eq!(reduce_naive(&empty).unwrap(), Pairs::default());
        let verts = Filtration::new((0..4).map(|v| Simplex::new([v], 0.0)).collect(), ComplexType::Rips, 1.0, 2);
        let p = reduce_naive(&verts).unwrap();
        assert!(p.finite.is_empty());
        assert_eq!(p.essential, vec![0, 1, 2, 3]);
        assert_eq!(reduce_twist(&verts, &[]).unwrap(), p);
    }

    #[test]
    fn hollow_triangle_has_one_essential_loop() {
        let mut s: Vec<Simplex> = (0..3).map(|v| Simplex::new([v], 0.0)).collect();
        s.push(Simplex::new([0, 1], 1.0));
        s.push(Simplex::new([1, 2], 2.0));
        s.push(Simplex::new([0, 2], 3.0));
        let f = Filtration::new(s, ComplexType::Rips, 3.0, 1);
        let naive = reduce_naive(&f).unwrap();
        assert_eq!(naive.finite, vec![(1, 3), (2, 4)]);
        assert_eq!(naive.essential, vec![0, 5]);
        assert_eq!(reduce_twist(&f, &[]).unwrap(), naive);
        assert_eq!(reduce_twist(&f, &[1]).unwrap().essential, vec![5]);
    }
}
