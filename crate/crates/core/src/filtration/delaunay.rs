//! Incremental Delaunay triangulation in the plane and in space.
//!
//! Bowyer–Watson insertion with exact predicates. The convex hull is closed
//! off by ghost simplices sharing a vertex at infinity, so points outside the
//! current hull need no special case. A point conflicts with a simplex only
//! when it lies strictly inside the circumsphere, which never creates flat
//! simplices; for cospherical inputs the insertion order (a Morton curve,
//! ties by index) decides which of the equally valid triangulations results.

use smallvec::SmallVec;

use super::geometry::{c2, c3, in_sphere, orient};
use crate::cloud::PointCloud;
use crate::error::{Error, Result};

const INF: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

/// Finite top-dimensional Delaunay simplices with vertices sorted ascending.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub dim: usize,
    pub simplices: Vec<SmallVec<[u32; 4]>>,
    /// Points that coincide with an earlier vertex, as `(point, vertex)`.
    pub duplicates: Vec<(u32, u32)>,
}

pub fn delaunay(cloud: &PointCloud) -> Result<Triangulation> {
    match cloud.ambient_dim() {
        2 => Mesh::<3>::build(cloud.coords()).map(|m| m.finish()),
        3 => Mesh::<4>::build(cloud.coords()).map(|m| m.finish()),
        d => Err(Error::param(format!("Delaunay triangulation needs points in 2 or 3 dimensions, got {d}"))),
    }
}

struct Mesh<'a, const K: usize> {
    coords: &'a [f64],
    verts: Vec<[u32; K]>,
    nbrs: Vec<[u32; K]>,
    alive: Vec<bool>,
    stamp: Vec<u32>,
    epoch: u32,
    free: Vec<u32>,
    last: u32,
    turn: usize,
    duplicates: Vec<(u32, u32)>,
}

fn morton_order(coords: &[f64], dim: usize) -> Vec<u32> {
    let bits: u32 = if dim == 2 { 31 } else { 21 };
    let (mut lo, mut hi) = (vec![f64::INFINITY; dim], vec![f64::NEG_INFINITY; dim]);
    for p in coords.chunks_exact(dim) {
        for c in 0..dim {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    let cells = ((1u64 << bits) - 1) as f64;
    let key = |p: &[f64]| {
        let mut k = 0u64;
        let q: Vec<u64> = (0..dim)
            .map(|c| {
                let span = hi[c] - lo[c];
                if span > 0.0 { ((p[c] - lo[c]) / span * cells) as u64 } else { 0 }
            })
            .collect();
        for b in (0..bits).rev() {
            for qc in &q {
                k = (k << 1) | ((qc >> b) & 1);
            }
        }
        k
    };
    let mut order: Vec<(u64, u32)> = coords.chunks_exact(dim).enumerate().map(|(i, p)| (key(p), i as u32)).collect();
    order.sort_unstable();
    order.into_iter().map(|(_, i)| i).collect()
}

impl<'a, const K: usize> Mesh<'a, K> {
    const D: usize = K - 1;

    fn pt(&self, v: u32) -> &'a [f64] {
        let d = Self::D;
        &self.coords[v as usize * d..(v as usize + 1) * d]
    }

    fn points(&self, s: &[u32; K]) -> [&'a [f64]; K] {
        std::array::from_fn(|i| self.pt(s[i]))
    }

    fn is_ghost(&self, s: u32) -> bool {
        self.verts[s as usize].contains(&INF)
    }

    /// Orientation of `s` with slot `i` replaced by point `p`.
    fn orient_with(&self, s: &[u32; K], i: usize, p: &[f64]) -> f64 {
        let mut pts = self.points_or(s, p);
        pts[i] = p;
        orient(&pts)
    }

    /// Points of `s`, using `fill` for the vertex at infinity.
    fn points_or(&self, s: &[u32; K], fill: &'a [f64]) -> [&'a [f64]; K] {
        std::array::from_fn(|i| if s[i] == INF { fill } else { self.pt(s[i]) })
    }

    fn conflicts(&self, s: u32, p: &'a [f64]) -> bool {
        let v = &self.verts[s as usize];
        match v.iter().position(|&x| x == INF) {
            None => in_sphere(&self.points(v), p) > 0.0,
            Some(slot) => {
                let o = self.orient_with(v, slot, p);
                if o != 0.0 {
                    return o > 0.0;
                }
                // On the hull facet's hyperplane: conflict iff strictly inside
                // the facet's circumscribed disk.
                let facet: SmallVec<[&[f64]; 3]> = v.iter().filter(|&&x| x != INF).map(|&x| self.pt(x)).collect();
                if K == 3 {
                    strictly_between(facet[0], facet[1], p)
                } else {
                    let inner = self.nbrs[s as usize][slot];
                    let q = self.verts[inner as usize].iter().copied().find(|x| !v.contains(x)).expect("opposite vertex");
                    let qp = self.pt(q);
                    let ori = robust::orient3d(c3(facet[0]), c3(facet[1]), c3(facet[2]), c3(qp));
                    let ins = robust::insphere(c3(facet[0]), c3(facet[1]), c3(facet[2]), c3(qp), c3(p));
                    ins * ori.signum() > 0.0
                }
            }
        }
    }

    fn alloc(&mut self, v: [u32; K]) -> u32 {
        if let Some(s) = self.free.pop() {
            self.verts[s as usize] = v;
            self.nbrs[s as usize] = [NONE; K];
            self.alive[s as usize] = true;
            s
        } else {
            self.verts.push(v);
            self.nbrs.push([NONE; K]);
            self.alive.push(true);
            self.stamp.push(0);
            (self.verts.len() - 1) as u32
        }
    }

    fn build(coords: &'a [f64]) -> Result<Self> {
        let d = Self::D;
        let order = morton_order(coords, d);
        let mut mesh = Mesh {
            coords,
            verts: Vec::new(),
            nbrs: Vec::new(),
            alive: Vec::new(),
            stamp: Vec::new(),
            epoch: 0,
            free: Vec::new(),
            last: 0,
            turn: 0,
            duplicates: Vec::new(),
        };
        let init = mesh.initial_simplex(&order)?;
        mesh.seed_simplex(init);
        for &v in &order {
            if !init.contains(&v) {
                mesh.insert(v)?;
            }
        }
        Ok(mesh)
    }

    fn initial_simplex(&self, order: &[u32]) -> Result<[u32; K]> {
        let degenerate = || Error::Degenerate("all points are affinely dependent".into());
        let mut chosen: Vec<u32> = Vec::with_capacity(K);
        let first = *order.first().ok_or_else(degenerate)?;
        chosen.push(first);
        let a = self.pt(first);
        let second = order.iter().copied().find(|&v| self.pt(v) != a).ok_or_else(degenerate)?;
        chosen.push(second);
        let b = self.pt(second);
        let third = order
            .iter()
            .copied()
            .find(|&v| {
                let c = self.pt(v);
                if K == 3 {
                    robust::orient2d(c2(a), c2(b), c2(c)) != 0.0
                } else {
                    not_collinear3(a, b, c)
                }
            })
            .ok_or_else(degenerate)?;
        chosen.push(third);
        if K == 4 {
            let c = self.pt(third);
            let fourth = order
                .iter()
                .copied()
                .find(|&v| robust::orient3d(c3(a), c3(b), c3(c), c3(self.pt(v))) != 0.0)
                .ok_or_else(degenerate)?;
            chosen.push(fourth);
        }
        let mut s: [u32; K] = std::array::from_fn(|i| chosen[i]);
        if orient(&self.points(&s)) < 0.0 {
            s.swap(0, 1);
        }
        Ok(s)
    }

    fn seed_simplex(&mut self, s: [u32; K]) {
        let core = self.alloc(s);
        let mut ghosts = [0u32; K];
        for i in 0..K {
            let mut g = s;
            g[i] = INF;
            // Flip so that a point beyond the hull facet orients positively.
            let (x, y) = if i == 0 { (1, 2) } else if i == 1 { (0, 2) } else { (0, 1) };
            g.swap(x, y);
            ghosts[i] = self.alloc(g);
        }
        self.nbrs[core as usize] = ghosts;
        for i in 0..K {
            let g = ghosts[i];
            let gv = self.verts[g as usize];
            let mut nb = [NONE; K];
            for j in 0..K {
                nb[j] = if gv[j] == INF {
                    core
                } else {
                    // The ghost across the ridge without gv[j] replaces gv[j] by INF.
                    let k = s.iter().position(|&x| x == gv[j]).unwrap();
                    ghosts[k]
                };
            }
            self.nbrs[g as usize] = nb;
        }
        self.last = core;
    }

    /// Visibility walk from the last created simplex. Walks in a Delaunay
    /// triangulation cannot cycle, so no memory is needed.
    fn locate(&mut self, p: &[f64]) -> u32 {
        let mut s = self.last;
        if self.is_ghost(s) {
            let slot = self.verts[s as usize].iter().position(|&x| x == INF).unwrap();
            s = self.nbrs[s as usize][slot];
        }
        loop {
            let v = self.verts[s as usize];
            self.turn = self.turn.wrapping_add(1);
            let next = (0..K)
                .map(|r| (r + self.turn) % K)
                .find(|&i| self.orient_with(&v, i, p) < 0.0)
                .map(|i| self.nbrs[s as usize][i]);
            match next {
                None => return s,
                Some(t) if self.is_ghost(t) => return t,
                Some(t) => s = t,
            }
        }
    }

    fn insert(&mut self, v: u32) -> Result<()> {
        let p = self.pt(v);
        let start = self.locate(p);
        let start = if self.conflicts(start, p) {
            start
        } else if let Some(&twin) = self.verts[start as usize].iter().find(|&&x| x != INF && self.pt(x) == p) {
            self.duplicates.push((v, twin));
            return Ok(());
        } else {
            match (0..self.verts.len() as u32).find(|&t| self.alive[t as usize] && self.conflicts(t, p)) {
                Some(t) => t,
                None => {
                    let twin = (0..self.verts.len())
                        .filter(|&t| self.alive[t])
                        .flat_map(|t| self.verts[t])
                        .find(|&x| x != INF && self.pt(x) == p)
                        .ok_or_else(|| Error::Structural(format!("point {v} conflicts with no simplex")))?;
                    self.duplicates.push((v, twin));
                    return Ok(());
                }
            }
        };

        self.epoch += 1;
        let epoch = self.epoch;
        let mut cavity = vec![start];
        self.stamp[start as usize] = epoch;
        // (cavity simplex, slot, outside simplex, back slot in outside)
        let mut boundary: Vec<(u32, usize, u32, usize)> = Vec::new();
        let mut head = 0;
        while head < cavity.len() {
            let s = cavity[head];
            head += 1;
            for i in 0..K {
                let t = self.nbrs[s as usize][i];
                if self.stamp[t as usize] == epoch {
                    continue;
                }
                if self.conflicts(t, p) {
                    self.stamp[t as usize] = epoch;
                    cavity.push(t);
                } else {
                    let back = self.nbrs[t as usize].iter().position(|&x| x == s).unwrap();
                    boundary.push((s, i, t, back));
                }
            }
        }
        // The outside simplices keep their stamps from earlier epochs; a
        // boundary simplex can appear several times, which is fine.
        let new_verts: Vec<[u32; K]> = boundary
            .iter()
            .map(|&(s, i, _, _)| {
                let mut nv = self.verts[s as usize];
                nv[i] = v;
                nv
            })
            .collect();
        for &s in &cavity {
            self.alive[s as usize] = false;
            self.free.push(s);
        }
        let mut ridges: Vec<([u32; 3], u32, usize)> = Vec::with_capacity(boundary.len() * (K - 1));
        let mut created = Vec::with_capacity(boundary.len());
        for (b, nv) in boundary.iter().zip(new_verts) {
            let &(_, i, t, back) = b;
            let n = self.alloc(nv);
            created.push(n);
            self.nbrs[n as usize][i] = t;
            self.nbrs[t as usize][back] = n;
            for j in (0..K).filter(|&j| j != i) {
                let mut key = [NONE; 3];
                let mut w = 0;
                for (x, &u) in nv.iter().enumerate() {
                    if x != i && x != j {
                        key[w] = u;
                        w += 1;
                    }
                }
                key[..w].sort_unstable();
                ridges.push((key, n, j));
            }
        }
        ridges.sort_unstable_by_key(|r| r.0);
        for pair in ridges.chunks(2) {
            let [(ka, a, ja), (kb, b, jb)] = [pair[0], pair[1]];
            if ka != kb {
                return Err(Error::Structural("cavity boundary is not a closed surface".into()));
            }
            self.nbrs[a as usize][ja] = b;
            self.nbrs[b as usize][jb] = a;
        }
        self.last = *created.iter().find(|&&s| !self.is_ghost(s)).unwrap_or(&created[0]);
        Ok(())
    }

    fn finish(self) -> Triangulation {
        let simplices = self
            .verts
            .iter()
            .zip(&self.alive)
            .filter(|(v, &a)| a && !v.contains(&INF))
            .map(|(v, _)| {
                let mut s: SmallVec<[u32; 4]> = v.iter().copied().collect();
                s.sort_unstable();
                s
            })
            .collect();
        Triangulation { dim: Self::D, simplices, duplicates: self.duplicates }
    }
}

/// For collinear `a`, `b`, `p`: `p` lies strictly inside the segment `ab`.
fn strictly_between(a: &[f64], b: &[f64], p: &[f64]) -> bool {
    let c = if a[0] != b[0] { 0 } else { 1 };
    let (lo, hi) = if a[c] < b[c] { (a[c], b[c]) } else { (b[c], a[c]) };
    lo < p[c] && p[c] < hi
}

fn not_collinear3(a: &[f64], b: &[f64], c: &[f64]) -> bool {
    [(0, 1), (1, 2), (0, 2)].iter().any(|&(i, j)| {
        robust::orient2d(
            robust::Coord { x: a[i], y: a[j] },
            robust::Coord { x: b[i], y: b[j] },
            robust::Coord { x: c[i], y: c[j] },
        ) != 0.0
    })
}
