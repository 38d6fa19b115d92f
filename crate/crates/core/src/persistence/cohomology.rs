//! Rips persistence without materializing the filtration.
//!
//! Degree 0 comes from union–find with the elder rule. Higher degrees reduce
//! the coboundary matrix: k-simplices are columns, processed from the last
//! in filtration order to the first, and the pivot of a column is its
//! earliest cofacet. Cofacets are enumerated on the fly from the neighbour
//! graph, and only the columns that needed additions keep their history.
//! The pairing equals the one from reducing the boundary matrix of the same
//! filtration order.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use super::Interval;
use crate::error::{Error, Result};
use crate::filtration::NeighborGraph;

const PAD: u32 = u32::MAX;

/// A simplex of known dimension: value plus sorted vertices padded with `PAD`.
#[derive(Clone, Copy, Debug)]
struct Key {
    value: f64,
    v: [u32; 4],
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then_with(|| self.v.cmp(&other.v))
    }
}

struct Engine<'g> {
    graph: &'g NeighborGraph,
    scratch: Vec<(u32, f64)>,
}

impl<'g> Engine<'g> {
    /// Appends the cofacets of the `len`-vertex simplex `s` to `out`.
    fn cofacets(&mut self, s: &Key, len: usize, out: &mut Vec<Key>) {
        self.scratch.clear();
        self.scratch.extend(self.graph.neighbors(s.v[0] as usize).iter().copied());
        for &u in &s.v[1..len] {
            let nu = self.graph.neighbors(u as usize);
            let mut k = 0;
            self.scratch.retain_mut(|(w, d)| {
                while k < nu.len() && nu[k].0 < *w {
                    k += 1;
                }
                if k < nu.len() && nu[k].0 == *w {
                    *d = d.max(nu[k].1);
                    true
                } else {
                    false
                }
            });
            if self.scratch.is_empty() {
                return;
            }
        }
        for &(w, d) in &self.scratch {
            out.push(Key { value: s.value.max(d), v: insert(&s.v, len, w) });
        }
    }
}

impl Engine<'_> {
    /// The earliest cofacet of `s`, without materializing the coboundary.
    ///
    /// Common neighbours come out in increasing index order, and inserting a
    /// larger vertex into a fixed vertex set gives a lexicographically larger
    /// tuple, so the first cofacet with the same value as `s` is the minimum.
    fn min_cofacet(&self, s: &Key, len: usize) -> Option<Key> {
        let lists: [&[(u32, f64)]; 4] =
            std::array::from_fn(|i| if i < len { self.graph.neighbors(s.v[i] as usize) } else { &[][..] });
        let mut cursor = [0usize; 4];
        let mut best: Option<Key> = None;
        'outer: for &(w, d0) in lists[0] {
            let mut value = s.value.max(d0);
            for i in 1..len {
                let list = lists[i];
                let c = &mut cursor[i];
                while *c < list.len() && list[*c].0 < w {
                    *c += 1;
                }
                if *c == list.len() {
                    break 'outer;
                }
                if list[*c].0 != w {
                    continue 'outer;
                }
                value = value.max(list[*c].1);
            }
            if best.is_some_and(|b| b.value <= value) {
                continue;
            }
            best = Some(Key { value, v: insert(&s.v, len, w) });
            if value == s.value {
                break;
            }
        }
        best
    }
}

/// `v[..len]` with `w` inserted in sorted position.
fn insert(v: &[u32; 4], len: usize, w: u32) -> [u32; 4] {
    let mut out = [PAD; 4];
    let mut i = 0;
    let mut placed = false;
    for &x in &v[..len] {
        if !placed && w < x {
            out[i] = w;
            i += 1;
            placed = true;
        }
        out[i] = x;
        i += 1;
    }
    if !placed {
        out[i] = w;
    }
    out
}

fn pop_pivot(heap: &mut BinaryHeap<Reverse<Key>>) -> Option<Key> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek().map(|r| r.0) == Some(top) {
            heap.pop();
        } else {
            return Some(top);
        }
    }
    None
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

/// All persistence intervals of the Rips filtration of `graph` in degrees
/// `0..=max_degree`, including zero-length ones, ordered by degree then
/// birth and death. Degrees above 2 are not supported.
pub fn rips_intervals(graph: &NeighborGraph, max_degree: usize) -> Result<Vec<Interval>> {
    if max_degree > 2 {
        return Err(Error::UnsupportedDegree(max_degree));
    }
    let n = graph.len();
    let mut out = Vec::new();

    let mut edges: Vec<Key> = Vec::with_capacity(graph.edge_count());
    for i in 0..n {
        for &(j, d) in graph.neighbors(i) {
            if (j as usize) > i {
                edges.push(Key { value: d, v: [i as u32, j, PAD, PAD] });
            }
        }
    }
    edges.sort_unstable();

    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut merging: Vec<bool> = vec![false; edges.len()];
    for (e, key) in edges.iter().enumerate() {
        let (a, b) = (find(&mut parent, key.v[0]), find(&mut parent, key.v[1]));
        if a != b {
            // Roots are the oldest (smallest) vertices; the younger one dies.
            parent[a.max(b) as usize] = a.min(b);
            merging[e] = true;
            out.push(Interval { dim: 0, birth: 0.0, death: key.value });
        }
    }
    for v in 0..n as u32 {
        if find(&mut parent, v) == v {
            out.push(Interval { dim: 0, birth: 0.0, death: f64::INFINITY });
        }
    }
    if max_degree == 0 {
        return Ok(order(out));
    }

    let mut engine = Engine { graph, scratch: Vec::new() };
    let mut columns: Vec<Key> = edges.iter().zip(&merging).filter(|(_, &m)| !m).map(|(k, _)| *k).collect();

    for k in 1..=max_degree {
        let len = k + 1;
        let mut pivots: FxHashMap<[u32; 4], u32> = FxHashMap::default();
        // History of columns that needed additions: the simplices whose
        // coboundaries sum to the reduced column (the column's own simplex
        // included).
        let mut history: Vec<(Key, Vec<Key>)> = Vec::new();
        let mut cof = Vec::new();
        let mut heap = BinaryHeap::new();

        for &sigma in columns.iter().rev() {
            let Some(first) = engine.min_cofacet(&sigma, len) else {
                out.push(Interval { dim: k, birth: sigma.value, death: f64::INFINITY });
                continue;
            };
            if !pivots.contains_key(&first.v) {
                history.push((sigma, Vec::new()));
                pivots.insert(first.v, (history.len() - 1) as u32);
                out.push(Interval { dim: k, birth: sigma.value, death: first.value });
                continue;
            }
            heap.clear();
            cof.clear();
            engine.cofacets(&sigma, len, &mut cof);
            heap.extend(cof.iter().map(|&c| Reverse(c)));
            let mut used: Vec<Key> = vec![sigma];
            let mut done = false;
            while let Some(p) = pop_pivot(&mut heap) {
                match pivots.get(&p.v) {
                    None => {
                        used.sort_unstable();
                        let mut v = Vec::with_capacity(used.len());
                        for key in used.drain(..) {
                            if v.last() == Some(&key) {
                                v.pop();
                            } else {
                                v.push(key);
                            }
                        }
                        history.push((sigma, v));
                        pivots.insert(p.v, (history.len() - 1) as u32);
                        out.push(Interval { dim: k, birth: sigma.value, death: p.value });
                        done = true;
                        break;
                    }
                    Some(&col) => {
                        heap.push(Reverse(p));
                        let (owner, extra) = &history[col as usize];
                        let add: Vec<Key> = if extra.is_empty() { vec![*owner] } else { extra.clone() };
                        for s in add {
                            used.push(s);
                            cof.clear();
                            engine.cofacets(&s, len, &mut cof);
                            heap.extend(cof.iter().map(|&c| Reverse(c)));
                        }
                    }
                }
            }
            if !done {
                out.push(Interval { dim: k, birth: sigma.value, death: f64::INFINITY });
            }
        }

        if k == max_degree {
            break;
        }
        // Columns of the next degree: (k+1)-simplices that were not pivots here.
        columns = cliques(graph, len + 1);
        columns.retain(|c| !pivots.contains_key(&c.v));
    }
    Ok(order(out))
}

/// Every clique of `len` vertices with its diameter, sorted in filtration order.
fn cliques(graph: &NeighborGraph, len: usize) -> Vec<Key> {
    fn grow(graph: &NeighborGraph, key: &mut Key, size: usize, len: usize, cand: &[(u32, f64)], out: &mut Vec<Key>) {
        for (i, &(w, _)) in cand.iter().enumerate() {
            let value = key.v[..size]
                .iter()
                .map(|&u| graph.distance(u, w).expect("candidate is adjacent"))
                .fold(key.value, f64::max);
            let saved = *key;
            key.v[size] = w;
            key.value = value;
            if size + 1 == len {
                out.push(*key);
            } else {
                let nw = graph.neighbors(w as usize);
                let next: Vec<(u32, f64)> = cand[i + 1..]
                    .iter()
                    .copied()
                    .filter(|&(x, _)| nw.binary_search_by_key(&x, |e| e.0).is_ok())
                    .collect();
                grow(graph, key, size + 1, len, &next, out);
            }
            *key = saved;
        }
    }
    let mut out = Vec::new();
    for v in 0..graph.len() {
        let cand: Vec<(u32, f64)> = graph.neighbors(v).iter().copied().filter(|&(w, _)| w as usize > v).collect();
        let mut key = Key { value: 0.0, v: [v as u32, PAD, PAD, PAD] };
        grow(graph, &mut key, 1, len, &cand, &mut out);
    }
    out.sort_unstable();
    out
}

fn order(mut out: Vec<Interval>) -> Vec<Interval> {
    out.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death)));
    out
}
