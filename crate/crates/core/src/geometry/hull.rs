//! Convex hulls in `R^d` for `1 ≤ d ≤ 8`.
//!
//! Randomized incremental construction (beneath–beyond). Every facet keeps a
//! conflict list of the not-yet-inserted points strictly beyond it, and every
//! such point records the one facet whose list holds it. Points are inserted
//! in a fixed pseudo-random order; a point whose conflict facet has vanished
//! without it landing on a new facet is interior and never looked at again.
//!
//! Facets are simplicial throughout; no coplanar merging is attempted. A new
//! cone facet inherits its orientation from the facet slot its apex replaces.
//! Facets in the rounding band of the apex count as visible, as do hidden
//! facets whose shared ridge would give a flat cone.
//!
//! A build whose decisions came within the tolerance is checked against every
//! input point, otherwise only the vertices are checked. A failed check, or a
//! horizon that does not close, triggers a rebuild from coordinates jittered
//! well inside the tolerance; if that fails too the error is numerical.

use std::collections::HashMap;

use super::linalg::{cross_normal, dot, factorial};
use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const MAX_DIM: usize = 8;

const NONE: u32 = u32::MAX;

/// Seed for the insertion order; fixed so that a given input order always
/// produces the same facet list.
const INSERTION_SEED: u64 = 0x6875_6c6c_5f6f_7264;
/// Seed and attempt count for rebuilding from jittered coordinates.
const JOGGLE_SEED: u64 = 0x6a6f_6767_6c65;
const JOGGLE_ATTEMPTS: u64 = 4;

/// A simplicial facet with outward unit normal: `⟨normal, x⟩ ≤ offset` on the hull.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub vertex_indices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
    /// `(d−1)`-dimensional volume of the facet simplex.
    pub measure: f64,
}

impl Facet {
    /// Signed distance of `p` beyond the supporting hyperplane.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

#[derive(Clone, Debug)]
pub struct Hull {
    dim: usize,
    vertex_indices: Vec<usize>,
    vertex_coords: Vec<f64>,
    facets: Vec<Facet>,
    tolerance: f64,
    volume: f64,
    surface: f64,
}

impl Hull {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Input indices of the hull vertices, ascending.
    pub fn vertex_indices(&self) -> &[usize] {
        &self.vertex_indices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Flat coordinates of the hull vertices, in `vertex_indices` order.
    pub fn vertex_coords(&self) -> &[f64] {
        &self.vertex_coords
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.vertex_coords.chunks_exact(self.dim)
    }

    /// Coordinates of input point `index`, if it is a hull vertex.
    pub fn point(&self, index: usize) -> Option<&[f64]> {
        let pos = self.vertex_indices.binary_search(&index).ok()?;
        Some(&self.vertex_coords[pos * self.dim..(pos + 1) * self.dim])
    }

    pub fn facet_points(&self, facet: &Facet) -> Vec<&[f64]> {
        facet
            .vertex_indices
            .iter()
            .map(|&i| self.point(i).expect("facet vertex is a hull vertex"))
            .collect()
    }

    /// Containment tolerance, `1e-9 · (1 + max |coordinate|)`.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn surface_area(&self) -> f64 {
        self.surface
    }

    /// Centroid of the hull vertices.
    pub fn vertex_centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in self.vertices() {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let k = self.vertex_indices.len() as f64;
        c.iter_mut().for_each(|x| *x /= k);
        c
    }

    /// Cone decomposition `(1/d) Σ_f measure_f · (offset_f − ⟨normal_f, reference⟩)`.
    /// Equals the volume for any reference point; terms are nonnegative when
    /// the reference lies inside.
    pub fn cone_volume(&self, reference: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| f.measure * (f.offset - dot(&f.normal, reference)))
            .sum::<f64>()
            / self.dim as f64
    }

    /// Largest signed distance of any point beyond any facet.
    pub fn max_violation(&self, coords: &[f64]) -> f64 {
        coords
            .chunks_exact(self.dim)
            .flat_map(|p| self.facets.iter().map(move |f| f.signed_distance(p)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// How far the worst vertex (or, with `all`, the worst input point) lies
    /// beyond a facet past the tolerance; nonpositive for a consistent hull,
    /// infinite on non-finite geometry.
    fn excess(&self, coords: &[f64], all: bool) -> f64 {
        let points = if all { coords } else { &self.vertex_coords[..] };
        let mut worst = f64::NEG_INFINITY;
        for f in &self.facets {
            if !f.measure.is_finite() || !f.offset.is_finite() {
                return f64::INFINITY;
            }
            for p in points.chunks_exact(self.dim) {
                let s = f.signed_distance(p);
                if s.is_nan() {
                    return f64::INFINITY;
                }
                worst = worst.max(s);
            }
        }
        worst - self.tolerance
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| f.signed_distance(p) <= tol)
    }

    pub(crate) fn from_parts(dim: usize, vertex_indices: Vec<usize>, vertex_coords: Vec<f64>, facets: Vec<Facet>) -> Self {
        let scale = vertex_coords.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut hull = Hull {
            dim,
            vertex_indices,
            vertex_coords,
            facets,
            tolerance: 1e-9 * (1.0 + scale),
            volume: 0.0,
            surface: 0.0,
        };
        hull.surface = hull.facets.iter().map(|f| f.measure).sum();
        hull.volume = if dim == 1 {
            hull.facets.iter().map(|f| f.offset).sum()
        } else {
            hull.cone_volume(&hull.vertex_centroid())
        };
        hull
    }
}

pub fn hull_volume(h: &Hull) -> f64 {
    h.volume()
}

pub fn hull_surface_area(h: &Hull) -> f64 {
    h.surface_area()
}

/// Hull of `coords.len() / dim` points given as flat coordinates.
pub fn convex_hull(coords: &[f64], dim: usize) -> Result<Hull> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension {
            dim,
            what: "convex hull",
        });
    }
    if coords.len() % dim != 0 {
        return Err(Error::arg(format!(
            "coordinate count {} is not a multiple of dimension {dim}",
            coords.len()
        )));
    }
    if coords.iter().any(|x| !x.is_finite()) {
        return Err(Error::arg("point coordinates must be finite"));
    }
    let n = coords.len() / dim;
    if n > (u32::MAX - 1) as usize {
        return Err(Error::arg("too many points"));
    }
    if dim == 1 {
        return hull_1d(coords);
    }
    let mut worst = f64::INFINITY;
    if let Some((hull, suspect)) = Builder::new(coords, dim)?.run()? {
        worst = hull.excess(coords, suspect);
        if worst <= 0.0 {
            return Ok(hull);
        }
    }
    // Rounding-level degeneracies (coplanar clusters, subnormal noise) can
    // defeat the floating-point visibility test. Rebuild from a jittered copy
    // whose perturbation stays well inside the tolerance.
    let scale = coords.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut jittered = coords.to_vec();
    for attempt in 0..JOGGLE_ATTEMPTS {
        let amplitude = 1e-13 * 10f64.powi(attempt as i32) * (1.0 + scale);
        let mut rng = RngStream::new(JOGGLE_SEED, attempt);
        for (j, &x) in jittered.iter_mut().zip(coords) {
            *j = x + amplitude * (2.0 * rng.uniform() - 1.0);
        }
        let Some((mut h, _)) = Builder::new(&jittered, dim)?.run()? else {
            continue;
        };
        h.vertex_coords = h.vertex_indices.iter().flat_map(|&v| coords[v * dim..(v + 1) * dim].iter().copied()).collect();
        let excess = h.excess(coords, true);
        if excess <= 0.0 {
            return Ok(h);
        }
        worst = worst.min(excess);
    }
    Err(Error::Numerical {
        what: "convex hull points beyond a facet",
        residual: worst,
        iterations: JOGGLE_ATTEMPTS as usize + 1,
    })
}

/// Convenience wrapper over [`convex_hull`] for a list of points.
pub fn convex_hull_of(points: &[Vec<f64>]) -> Result<Hull> {
    let dim = points.first().map_or(0, |p| p.len());
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::arg("points have mixed dimensions"));
    }
    let flat: Vec<f64> = points.iter().flatten().copied().collect();
    convex_hull(&flat, dim)
}

fn hull_1d(coords: &[f64]) -> Result<Hull> {
    let n = coords.len();
    if n == 0 {
        return Err(Error::Degenerate {
            dim: 1,
            affine_dim: 0,
        });
    }
    let (mut lo, mut hi) = (0, 0);
    for i in 0..n {
        if coords[i] < coords[lo] {
            lo = i;
        }
        if coords[i] > coords[hi] {
            hi = i;
        }
    }
    let scale = coords[lo].abs().max(coords[hi].abs());
    if coords[hi] - coords[lo] <= 1e-9 * (1.0 + scale) {
        return Err(Error::Degenerate {
            dim: 1,
            affine_dim: 0,
        });
    }
    let facets = vec![
        Facet {
            vertex_indices: vec![hi],
            normal: vec![1.0],
            offset: coords[hi],
            measure: 1.0,
        },
        Facet {
            vertex_indices: vec![lo],
            normal: vec![-1.0],
            offset: -coords[lo],
            measure: 1.0,
        },
    ];
    let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    Ok(Hull::from_parts(
        1,
        vec![a, b],
        vec![coords[a], coords[b]],
        facets,
    ))
}

#[derive(Clone)]
struct WorkFacet {
    verts: [u32; MAX_DIM],
    /// `nbr[k]` shares every vertex except `verts[k]`.
    nbr: [u32; MAX_DIM],
    normal: [f64; MAX_DIM],
    offset: f64,
    /// Length of the unnormalized cross-product normal.
    raw_norm: f64,
    outside: Vec<u32>,
    alive: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Mark {
    Unseen,
    Visible,
    Hidden,
}

struct Builder<'a> {
    d: usize,
    pts: &'a [f64],
    facets: Vec<WorkFacet>,
    free: Vec<u32>,
    tol: f64,
    flat: f64,
    suspect: bool,
    assigned: Vec<u32>,
    marks: Vec<(u32, Mark)>,
    stamp: u32,
    ridge_map: HashMap<[u32; MAX_DIM], (u32, usize)>,
}

impl<'a> Builder<'a> {
    fn new(pts: &'a [f64], d: usize) -> Result<Self> {
        let scale = pts.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(Self {
            d,
            pts,
            facets: Vec::new(),
            free: Vec::new(),
            tol: 1e-9 * (1.0 + scale),
            flat: 1e-13 * (1.0 + scale),
            suspect: false,
            assigned: vec![NONE; pts.len() / d],
            marks: Vec::new(),
            stamp: 0,
            ridge_map: HashMap::new(),
        })
    }

    #[inline]
    fn point(&self, i: u32) -> &'a [f64] {
        let d = self.d;
        &self.pts[i as usize * d..(i as usize + 1) * d]
    }

    #[inline]
    fn distance(&self, f: &WorkFacet, p: &[f64]) -> f64 {
        let mut s = -f.offset;
        for c in 0..self.d {
            s += f.normal[c] * p[c];
        }
        s
    }

    fn initial_simplex(&self) -> Result<Vec<u32>> {
        let d = self.d;
        let n = self.pts.len() / d;
        if n < d + 1 {
            return Err(Error::Degenerate {
                dim: d,
                affine_dim: n.saturating_sub(1),
            });
        }
        let first = (0..n as u32)
            .min_by(|&a, &b| self.point(a)[0].total_cmp(&self.point(b)[0]))
            .unwrap();
        let origin = self.point(first);
        let mut chosen = vec![first];
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut residual = vec![0.0; d];
        for k in 0..d {
            let mut best = (NONE, -1.0);
            for i in 0..n as u32 {
                let p = self.point(i);
                for c in 0..d {
                    residual[c] = p[c] - origin[c];
                }
                for u in &basis {
                    let proj = dot(&residual, u);
                    for c in 0..d {
                        residual[c] -= proj * u[c];
                    }
                }
                let dist = dot(&residual, &residual);
                if dist > best.1 {
                    best = (i, dist);
                }
            }
            if best.0 == NONE || best.1.sqrt() <= self.tol {
                return Err(Error::Degenerate { dim: d, affine_dim: k });
            }
            let p = self.point(best.0);
            let mut u: Vec<f64> = (0..d).map(|c| p[c] - origin[c]).collect();
            // Two Gram–Schmidt passes keep the basis orthonormal to rounding.
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(&u, b);
                    for c in 0..d {
                        u[c] -= proj * b[c];
                    }
                }
            }
            let len = dot(&u, &u).sqrt();
            u.iter_mut().for_each(|x| *x /= len);
            basis.push(u);
            chosen.push(best.0);
        }
        Ok(chosen)
    }

    fn alloc(&mut self, f: WorkFacet) -> u32 {
        if let Some(id) = self.free.pop() {
            self.facets[id as usize] = f;
            self.marks[id as usize] = (0, Mark::Unseen);
            id
        } else {
            self.facets.push(f);
            self.marks.push((0, Mark::Unseen));
            (self.facets.len() - 1) as u32
        }
    }

    /// Facet through `verts` with the normal given by their order. Putting a
    /// new apex into the slot of the vertex it replaces preserves outwardness,
    /// so only the initial simplex needs a geometric orientation test.
    fn make_facet(&self, verts: [u32; MAX_DIM]) -> WorkFacet {
        let d = self.d;
        let pts: Vec<&[f64]> = verts[..d].iter().map(|&v| self.point(v)).collect();
        let mut normal = [0.0; MAX_DIM];
        cross_normal(&pts, &mut normal[..d]);
        let raw_norm = dot(&normal[..d], &normal[..d]).sqrt();
        normal[..d].iter_mut().for_each(|x| *x /= raw_norm);
        let offset = dot(&normal[..d], pts[0]);
        WorkFacet {
            verts,
            nbr: [NONE; MAX_DIM],
            normal,
            offset,
            raw_norm,
            outside: Vec::new(),
            alive: true,
        }
    }

    /// Signed distance to facet `fid`, flagging the build when the decision
    /// it feeds falls inside the tolerance band.
    fn checked_distance(&mut self, fid: u32, p: &[f64]) -> f64 {
        let dist = self.distance(&self.facets[fid as usize], p);
        if dist.abs() <= self.tol {
            self.suspect = true;
        }
        dist
    }

    /// True when `p` lies within rounding distance of the affine hull of ridge
    /// `k` of facet `f`, so the cone facet over that ridge would be flat.
    fn cone_is_degenerate(&self, f: u32, k: usize, p: u32) -> bool {
        let d = self.d;
        let verts = &self.facets[f as usize].verts;
        let mut ridge = (0..d).filter(|&s| s != k).map(|s| self.point(verts[s]));
        let base = ridge.next().unwrap();
        let mut basis: Vec<[f64; MAX_DIM]> = Vec::with_capacity(d);
        let mut residual = [0.0; MAX_DIM];
        let pc = self.point(p);
        for c in 0..d {
            residual[c] = pc[c] - base[c];
        }
        for q in ridge {
            let mut u = [0.0; MAX_DIM];
            for c in 0..d {
                u[c] = q[c] - base[c];
            }
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(&u[..d], &b[..d]);
                    for c in 0..d {
                        u[c] -= proj * b[c];
                    }
                }
            }
            let len = dot(&u[..d], &u[..d]).sqrt();
            if !(len > 0.0) {
                continue;
            }
            u[..d].iter_mut().for_each(|x| *x /= len);
            basis.push(u);
        }
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(&residual[..d], &b[..d]);
                for c in 0..d {
                    residual[c] -= proj * b[c];
                }
            }
        }
        !(dot(&residual[..d], &residual[..d]).sqrt() > self.flat)
    }

    /// The hull, and whether any visibility or assignment decision was made
    /// within the tolerance band; `None` when a horizon failed to close.
    fn run(mut self) -> Result<Option<(Hull, bool)>> {
        let d = self.d;
        let n = self.pts.len() / d;
        let simplex = self.initial_simplex()?;
        // Facet a omits simplex vertex a, so its neighbour across the ridge
        // missing simplex vertex b is facet b.
        for omit in 0..=d {
            let mut verts = [NONE; MAX_DIM];
            let mut slot_owner = [0usize; MAX_DIM];
            let mut k = 0;
            for (j, &v) in simplex.iter().enumerate() {
                if j != omit {
                    verts[k] = v;
                    slot_owner[k] = j;
                    k += 1;
                }
            }
            let mut f = self.make_facet(verts);
            // The omitted vertex must lie beneath; an odd swap flips the normal.
            if self.distance(&f, self.point(simplex[omit])) > 0.0 {
                verts.swap(0, 1);
                slot_owner.swap(0, 1);
                f = self.make_facet(verts);
            }
            for slot in 0..d {
                f.nbr[slot] = slot_owner[slot] as u32;
            }
            self.alloc(f);
        }
        let in_simplex = |i: u32| simplex.contains(&i);
        for i in 0..n as u32 {
            if in_simplex(i) {
                continue;
            }
            let p = self.point(i);
            for fid in 0..=d as u32 {
                if self.checked_distance(fid, p) > self.tol {
                    self.facets[fid as usize].outside.push(i);
                    self.assigned[i as usize] = fid;
                    break;
                }
            }
        }

        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut rng = RngStream::new(INSERTION_SEED, n as u64);
        for i in (1..n).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            order.swap(i, j);
        }
        let mut visible = Vec::new();
        let mut horizon = Vec::new();
        let mut new_facets = Vec::new();
        let mut orphans = Vec::new();
        for &p in &order {
            if self.assigned[p as usize] != NONE {
                if !self.insert(p, &mut visible, &mut horizon, &mut new_facets, &mut orphans) {
                    return Ok(None);
                }
            }
        }
        let suspect = self.suspect;
        Ok(Some((self.finish(), suspect)))
    }

    fn insert(
        &mut self,
        p: u32,
        visible: &mut Vec<u32>,
        horizon: &mut Vec<(u32, usize, u32)>,
        new_facets: &mut Vec<u32>,
        orphans: &mut Vec<u32>,
    ) -> bool {
        let d = self.d;
        let pc = self.point(p);
        self.stamp = self.stamp.wrapping_add(1);
        let stamp = self.stamp;
        visible.clear();
        horizon.clear();
        new_facets.clear();
        orphans.clear();

        let start = self.assigned[p as usize];
        self.marks[start as usize] = (stamp, Mark::Visible);
        visible.push(start);
        let mut cursor = 0;
        // A hidden neighbour whose shared ridge would give a zero-measure cone
        // facet contains the new point in its plane; it is absorbed into the
        // visible region and the search resumes from it.
        loop {
            while cursor < visible.len() {
                let f = visible[cursor];
                cursor += 1;
                for k in 0..d {
                    let nb = self.facets[f as usize].nbr[k];
                    if self.marks[nb as usize].0 != stamp {
                        let m = if self.checked_distance(nb, pc) > -self.flat {
                            visible.push(nb);
                            Mark::Visible
                        } else {
                            Mark::Hidden
                        };
                        self.marks[nb as usize] = (stamp, m);
                    }
                }
            }
            horizon.clear();
            for &f in visible.iter() {
                for k in 0..d {
                    let nb = self.facets[f as usize].nbr[k];
                    if self.marks[nb as usize].1 == Mark::Hidden {
                        horizon.push((f, k, nb));
                    }
                }
            }
            let mut absorbed = false;
            for &(f, k, h) in horizon.iter() {
                if self.marks[h as usize].1 == Mark::Hidden && self.cone_is_degenerate(f, k, p) {
                    self.marks[h as usize] = (stamp, Mark::Visible);
                    visible.push(h);
                    absorbed = true;
                    self.suspect = true;
                }
            }
            if !absorbed {
                break;
            }
        }

        for &(f, k, h) in horizon.iter() {
            let mut verts = self.facets[f as usize].verts;
            verts[k] = p;
            let mut g = self.make_facet(verts);
            g.nbr[k] = h;
            let gid = self.alloc(g);
            let hf = &mut self.facets[h as usize];
            for slot in 0..d {
                if hf.nbr[slot] == f {
                    hf.nbr[slot] = gid;
                }
            }
            // Ridges through p are shared by exactly two new facets.
            for i in 0..d {
                if i == k {
                    continue;
                }
                let mut key = [NONE; MAX_DIM];
                let mut m = 0;
                for (slot, &v) in verts[..d].iter().enumerate() {
                    if slot != i && slot != k {
                        key[m] = v;
                        m += 1;
                    }
                }
                key[..m].sort_unstable();
                match self.ridge_map.remove(&key) {
                    Some((other, other_slot)) => {
                        self.facets[gid as usize].nbr[i] = other;
                        self.facets[other as usize].nbr[other_slot] = gid;
                    }
                    None => {
                        self.ridge_map.insert(key, (gid, i));
                    }
                }
            }
            new_facets.push(gid);
        }
        // Every ridge through p pairs up on a consistent horizon.
        if !self.ridge_map.is_empty() {
            return false;
        }

        for &f in visible.iter() {
            let wf = &mut self.facets[f as usize];
            wf.alive = false;
            orphans.append(&mut wf.outside);
            self.free.push(f);
        }
        self.assigned[p as usize] = NONE;
        for &q in orphans.iter() {
            if q == p {
                continue;
            }
            self.assigned[q as usize] = NONE;
            let qc = self.point(q);
            for &g in new_facets.iter() {
                if self.checked_distance(g, qc) > self.tol {
                    self.facets[g as usize].outside.push(q);
                    self.assigned[q as usize] = g;
                    break;
                }
            }
        }
        true
    }

    fn finish(self) -> Hull {
        let d = self.d;
        let max_d = factorial(d - 1);
        let mut vertex_set: Vec<usize> = Vec::new();
        let mut facets = Vec::new();
        for f in self.facets.iter().filter(|f| f.alive) {
            let vertex_indices: Vec<usize> = f.verts[..d].iter().map(|&v| v as usize).collect();
            vertex_set.extend_from_slice(&vertex_indices);
            facets.push(Facet {
                vertex_indices,
                normal: f.normal[..d].to_vec(),
                offset: f.offset,
                measure: f.raw_norm / max_d,
            });
        }
        vertex_set.sort_unstable();
        vertex_set.dedup();
        let mut coords = Vec::with_capacity(vertex_set.len() * d);
        for &v in &vertex_set {
            coords.extend_from_slice(self.point(v as u32));
        }
        Hull::from_parts(d, vertex_set, coords, facets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::linalg::simplex_measure;

    fn gaussian_cloud(n: usize, d: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        (0..n * d).map(|_| rng.normal()).collect()
    }

    #[test]
    fn unit_square() {
        let pts = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let h = convex_hull(&pts, 2).unwrap();
        assert_eq!(h.facets().len(), 4);
        assert!((h.volume() - 1.0).abs() < 1e-14);
        assert!((h.surface_area() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn corner_simplex_3d() {
        let pts = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let h = convex_hull(&pts, 3).unwrap();
        assert_eq!(h.facets().len(), 4);
        assert!((h.volume() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn corner_simplex_4d() {
        let mut pts = vec![0.0; 4];
        for i in 0..4 {
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            pts.extend(e);
        }
        let h = convex_hull(&pts, 4).unwrap();
        assert_eq!(h.facets().len(), 5);
        assert!((h.volume() - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn interior_points_are_dropped() {
        let mut pts = vec![0.0, 0.0, 2.0, 0.0, 2.0, 2.0, 0.0, 2.0];
        pts.extend([1.0, 1.0, 0.5, 1.5, 1.9, 0.1]);
        let h = convex_hull(&pts, 2).unwrap();
        assert_eq!(h.vertex_indices(), &[0, 1, 2, 3]);
        assert!((h.volume() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn planar_gaussian_cloud() {
        let pts = gaussian_cloud(10_000, 2, 11);
        let h = convex_hull(&pts, 2).unwrap();
        assert!(h.max_violation(&pts) <= h.tolerance());
        assert_eq!(h.facets().len(), h.vertex_indices().len());
    }

    #[test]
    fn facet_invariants_in_higher_dimensions() {
        for d in 3..=6 {
            let pts = gaussian_cloud(400, d, d as u64);
            let h = convex_hull(&pts, d).unwrap();
            assert!(h.max_violation(&pts) <= h.tolerance(), "d={d}");
            for f in h.facets() {
                let n2: f64 = f.normal.iter().map(|x| x * x).sum();
                assert!((n2.sqrt() - 1.0).abs() < 1e-12);
                let verts = h.facet_points(f);
                for v in &verts {
                    assert!(f.signed_distance(v).abs() <= h.tolerance());
                }
                let gram = simplex_measure(&verts);
                assert!(((f.measure - gram) / gram).abs() < 1e-9, "d={d}");
            }
            // Each ridge borders exactly two facets.
            let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
            for f in h.facets() {
                for skip in 0..d {
                    let mut r: Vec<usize> = f
                        .vertex_indices
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    r.sort_unstable();
                    *ridges.entry(r).or_default() += 1;
                }
            }
            assert!(ridges.values().all(|&c| c == 2), "d={d}");
        }
    }

    #[test]
    fn cone_identity_from_any_interior_point() {
        let pts = gaussian_cloud(2000, 3, 5);
        let h = convex_hull(&pts, 3).unwrap();
        let alt = h.cone_volume(&[0.01, -0.02, 0.03]);
        assert!(((alt - h.volume()) / h.volume()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs_are_reported() {
        let collinear = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        assert!(matches!(
            convex_hull(&collinear, 2),
            Err(Error::Degenerate { dim: 2, affine_dim: 1 })
        ));
        let planar = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        assert!(matches!(
            convex_hull(&planar, 3),
            Err(Error::Degenerate { affine_dim: 2, .. })
        ));
        assert!(matches!(convex_hull(&[0.0, 1.0], 2), Err(Error::Degenerate { .. })));
        assert!(convex_hull(&[0.0, f64::NAN, 1.0, 1.0, 0.0, 1.0], 2).is_err());
        assert!(convex_hull(&[0.0; 9], 9).is_err());
    }

    #[test]
    fn point_on_an_edge_of_the_first_simplex() {
        // The leftmost point sits on the segment between (0,0,0) and (0,0,0.1)
        // up to subnormal noise and seeds the initial simplex.
        let pts = [
            2.0, 0.0, 0.0,
            2.7813814474314e-309, 6.63123685e-316, -2.2982786799458352e-185,
            1.27857645e-314, 4e-323, 0.09999999986030161,
            -2.3534373682645354e-185, 9.113902538215674e-306, 0.025000000000147737,
            0.1, 0.1, 0.1,
        ];
        let h = convex_hull(&pts, 3).unwrap();
        assert_eq!(h.vertex_indices(), &[0, 1, 2, 4]);
        assert!((h.volume() - 0.1 * 0.2 / 6.0).abs() < 1e-10);
        assert!(h.facets().iter().all(|f| f.measure > 0.0 && f.normal.iter().all(|x| x.is_finite())));
    }

    #[test]
    fn thin_facets_far_from_the_origin_stay_convex() {
        // Two nearly coincident far points next to a sliver of points at x = 0.
        let pts = [
            4.345872247035e-311, 5.262549561594e-312, -44.0, 9.34475393726562e-306,
            -1.2338789709326767e-178, -1.0900715865557387e-175, 9.828718408715731e-306, 1.086461844974e-311,
            2.070238e-317, 3.70163287101258e-304, 0.0, 1.0,
            1.0, -8577.50588235259, -8577.50588235294, -8577.50588235294,
            1.597738007e-314, -8577.505877762567, -8577.50588235294, -8577.50588235294,
            0.0, 0.0, -8.268615575355671e-55, -8.444511664468678e-55,
            -8576.001951217979, 1.9324046689007864e-300, -8.444511647879363e-55, -8.444508261257198e-55,
            2.918577025524872e-305, 3.0517578125e-05, 4.973428e-317, 3.47328271065196e-310,
        ];
        let h = convex_hull(&pts, 4).unwrap();
        assert!(h.max_violation(&pts) <= 1e-9 * (1.0 + 8577.6));
        assert!(h.volume() > 0.0 && h.volume().is_finite());
    }

    #[test]
    fn orientation_survives_a_thin_hull() {
        // A cluster near the origin far from the initial simplex centroid.
        let pts = [
            4.345872247035e-311, 5.262549561594e-312, -44.0234375, 9.34475393726562e-306,
            -1.2338789709326767e-178, -1.0900715865557387e-175, 9.828718408715731e-306, 1.086461844974e-311,
            2.070238e-317, 3.70163287101258e-304, 0.0, 1.0,
            3.0517578125e-05, -8192.000000089407, -8577.50588235294, -8577.50588235294,
            -8577.50588235294, -1679.75, -8577.50588235294, 4.87005835e-315,
            3.0517578125e-05, 1.597737988e-314, -1.366235622987191e-54, -8.444511664468678e-55,
            8.81444000320541e-280, -8.444511664468678e-55, -8.444511664468475e-55, 1.496130911e-314,
            -2.353669384434984e-185, 0.0, -3.186183825229372e-58, 7.434364421365236e-307,
            0.0, 3.051757812510929e-05, 1.597737988e-314, -1.366235622987191e-54,
        ];
        let h = convex_hull(&pts, 4).unwrap();
        // Points 1, 6 and 7 coincide up to subnormal noise; any one may be kept.
        assert!(h.max_violation(&pts) <= h.tolerance());
        assert!((h.volume() / 1.2889544135568e8 - 1.0).abs() < 1e-6);
        assert_eq!(h.vertex_indices().len(), 7);
    }

    #[test]
    fn coplanar_neighbours_are_replaced_together() {
        // Points 0..=6 share the hyperplane x1 = x2 up to subnormal noise, with
        // collinear triples along two axes.
        let pts = [
            4.345872247035e-311, 5.262549561594e-312, -44.0, 9.34475393726562e-306,
            3.7209743447323555e-294, 3.7209743448696e-294, 1.6360836542265e-311, -8576.001951217651,
            -8577.50588235294, -8577.50588235294, -8577.50588235294, 3.866037082324293e-294,
            3.7209743448696e-294, 3.7209743448696e-294, 3.7209743448696e-294, -1.090071220342426e-175,
            -1.0900715865557387e-175, 1.2898405785e-314, 1.0000000000291038, 0.0,
            1.9914109365e-314, 0.0, 1.35675105885e-312, -8192.49951171875,
            -8577.50588235294, -8577.50588235294, -8577.50588235294, -8577.50588235294,
            -8576.42775735294, 1.2664206249946774e-295, -8.44451164730963e-55, 3.1312477e-317,
        ];
        let h = convex_hull(&pts, 4).unwrap();
        assert!(h.max_violation(&pts) <= 1e-9 * (1.0 + 8577.6));
        assert_eq!(h.vertex_indices(), &[0, 1, 2, 4, 6, 7]);
    }

    #[test]
    fn jittered_rebuild_restores_containment() {
        let pts = [
            4.345872247035e-311, 5.262549561594e-312, -44.0, 9.34475393726562e-306,
            -1.2338789709326767e-178, -1.0900715865557387e-175, 9.828718408715731e-306, 1.086461844974e-311,
            2.070238e-317, 3.70163287101258e-304, 0.0, 1.0,
            1.0, -8577.50588235259, -8577.50588235294, -8577.50588235294,
            1.597738007e-314, -8577.505877762567, -8577.50588235294, -8577.50588235294,
            3.0517578125001735e-05, 1.0, 0.1, 0.1078125,
            0.1, 0.0, 1.9914109365e-314, 0.0,
            3.051760540984105e-05, 4.973428e-317, 3.47328271065196e-310, -8.444511664401651e-55,
        ];
        let h = convex_hull(&pts, 4).unwrap();
        assert!(h.max_violation(&pts) <= h.tolerance());
        assert!(h.facets().iter().all(|f| f.measure.is_finite() && f.offset.is_finite()));
    }

    #[test]
    fn open_horizon_falls_back_to_a_rebuild() {
        let pts = [
            3.13151306251402e-294, -8577.505882334895, -8577.501411527744, -8577.50588235294,
            3.42914582231625e-310, -15.126470565795916, 8.487983385e-314, -8577.505859464756,
            -8577.505889505497, 6.2411637e-317, 5.51718905651e-312, 1.3178288e-316,
            1.412400398466485e-309, 3.373641746e-314, 5.432309224871e-311, -1712.1882352941175,
            1.0085721171e-313, -8577.5, -8577.50588235294, 5.432311268801e-311,
            -8577.20900735294, -21251.01176470588, -8577.50588235294, 4.771393735748364e-305,
            7.984e-320, 1.39073482144073e-309, 4.458839411774197e-308, 0.0,
            -8576.0, 4.08705946122e-312, 5.5180179611e-313, -8577.5,
            1.471549467e-315, -8284.505859375, -8577.50588235294, 0.00012209275189568013,
            -8576.000001192093, -12673.50018310547, -8577.505873412243, -8577.505882352887,
            -8577.974634737126, -8577.50588235294, 1.731386235246092e-307, 1.6e-322,
            8.2894255e-317, 2.655085066e-315, -8192.0, 6.73724449209786e-86,
            2.1729237467067e-311, -8577.50002297759, 4.771396027503818e-305, -2.0000190734935046,
            -8204.000000208966, 1.597738011e-314, -8577.505860567093, 9.5e-322,
            -8577.500244140625, 6.79702344376e-313, -8576.0, 9.522471088233e-312,
            -8576.000122070312, -8577.50588235294, 1.626072428504489e-260, 9.5225182798e-312,
            4.771396163311361e-305, -8212.0, 1.597738007e-314, 3.785767007357703e-270,
            -8577.50588235294, -8576.50588235294, 3.42235543578516e-310, 2.437764679629386e-309,
            -8577.568382265978, -3.25, 4.090209298723e-312, 1.7489887183e-314,
            -8577.505882352605, -8321.50588235294, 1.597738007e-314, -2.0,
            1.303754234368836e-309, 0.0, -8577.505859375236, -8576.503227323643,
            6.2411637e-317, 6.241069e-317, 0.0, 1.597713628e-314,
            2.070238e-317, -8192.003967285156, 1.046287222073407e-309, -2.0000019075814635,
        ];
        let h = convex_hull(&pts, 4).unwrap();
        assert!(h.max_violation(&pts) <= h.tolerance());
    }

    #[test]
    fn one_dimensional_hull() {
        let h = convex_hull(&[0.5, -1.0, 2.0, 0.0], 1).unwrap();
        assert!((h.volume() - 3.0).abs() < 1e-15);
        assert_eq!(h.vertex_indices(), &[1, 2]);
        assert_eq!(h.surface_area(), 2.0);
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let pts = gaussian_cloud(3000, 3, 9);
        let a = convex_hull(&pts, 3).unwrap();
        let b = convex_hull(&pts, 3).unwrap();
        assert_eq!(a.facets(), b.facets());
        assert_eq!(a.volume().to_bits(), b.volume().to_bits());
    }

    #[test]
    fn cospherical_cube_corners() {
        // Non-simplicial input: every square face is split into two triangles.
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.extend([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        let h = convex_hull(&pts, 3).unwrap();
        assert_eq!(h.facets().len(), 12);
        assert!((h.volume() - 1.0).abs() < 1e-14);
        assert!((h.surface_area() - 6.0).abs() < 1e-14);
    }
}
