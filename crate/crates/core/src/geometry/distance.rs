//! Point-to-polytope distance by Gilbert's support-point iteration.

use super::linalg::dot;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 1000;

/// Absolute accuracy certified by the duality gap.
pub const DISTANCE_TOL: f64 = 1e-9;

/// Euclidean distance from `p` to the convex hull of `vertices` (flat
/// coordinates, dimension `p.len()`).
pub fn distance_to_hull(p: &[f64], vertices: &[f64]) -> Result<f64> {
    let d = p.len();
    if d == 0 || vertices.is_empty() || vertices.len() % d != 0 {
        return Err(Error::arg("distance_to_hull needs a nonempty vertex set of matching dimension"));
    }
    let shifted: Vec<f64> = vertices
        .chunks_exact(d)
        .flat_map(|v| v.iter().zip(p).map(|(a, b)| a - b))
        .collect();
    min_norm_point(&shifted, d).map(|x| dot(&x, &x).sqrt())
}

/// Closest point of `conv(points)` to the origin.
fn min_norm_point(points: &[f64], d: usize) -> Result<Vec<f64>> {
    let q = |i: usize| &points[i * d..(i + 1) * d];
    let count = points.len() / d;
    let scale = points.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let round_off = 1e-14 * (1.0 + scale * scale);

    let mut simplex: Vec<usize> = vec![0];
    let mut x = q(0).to_vec();
    let mut last_gap = f64::INFINITY;
    for iteration in 0..MAX_ITERATIONS {
        let xx = dot(&x, &x);
        let norm = xx.sqrt();
        if norm <= DISTANCE_TOL {
            return Ok(x);
        }
        let (w, wx) = (0..count)
            .map(|i| (i, dot(q(i), &x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let gap = xx - wx;
        last_gap = gap;
        if gap <= DISTANCE_TOL * norm || gap <= round_off {
            return Ok(x);
        }
        if simplex.contains(&w) {
            // No new support point: x is optimal up to rounding in the subproblem.
            if gap <= 1e3 * round_off {
                return Ok(x);
            }
            return Err(Error::Numerical {
                what: "distance to hull",
                residual: gap / norm,
                iterations: iteration,
            });
        }
        simplex.push(w);
        let (support, point) = subset_min_norm(points, d, &simplex);
        simplex = support;
        x = point;
    }
    Err(Error::Numerical {
        what: "distance to hull",
        residual: last_gap / dot(&x, &x).sqrt().max(f64::MIN_POSITIVE),
        iterations: MAX_ITERATIONS,
    })
}

/// Min-norm point over all faces of the small simplex `ids`, by enumeration
/// of vertex subsets. Returns the supporting subset and the point.
fn subset_min_norm(points: &[f64], d: usize, ids: &[usize]) -> (Vec<usize>, Vec<f64>) {
    let q = |i: usize| &points[i * d..(i + 1) * d];
    let k = ids.len();
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let subset: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).map(|b| ids[b]).collect();
        let Some(weights) = affine_min_norm_weights(points, d, &subset) else {
            continue;
        };
        if weights.iter().any(|&w| w < 0.0) {
            continue;
        }
        let mut y = vec![0.0; d];
        for (&i, &w) in subset.iter().zip(&weights) {
            for (yc, qc) in y.iter_mut().zip(q(i)) {
                *yc += w * qc;
            }
        }
        let yy = dot(&y, &y);
        if best.as_ref().map_or(true, |b| yy < b.0) {
            best = Some((yy, subset, y));
        }
    }
    let (_, subset, y) = best.expect("singleton subsets are always feasible");
    (subset, y)
}

/// Barycentric weights of the origin's projection onto the affine hull of
/// `subset`, or `None` if the subset is affinely dependent.
fn affine_min_norm_weights(points: &[f64], d: usize, subset: &[usize]) -> Option<Vec<f64>> {
    let q = |i: usize| &points[i * d..(i + 1) * d];
    let m = subset.len() - 1;
    if m == 0 {
        return Some(vec![1.0]);
    }
    let y0 = q(subset[0]);
    let diffs: Vec<Vec<f64>> = subset[1..]
        .iter()
        .map(|&i| q(i).iter().zip(y0).map(|(a, b)| a - b).collect())
        .collect();
    // Normal equations G λ = −Dᵀ y0, solved with partial pivoting.
    let mut a = vec![0.0; m * (m + 1)];
    for r in 0..m {
        for c in 0..m {
            a[r * (m + 1) + c] = dot(&diffs[r], &diffs[c]);
        }
        a[r * (m + 1) + m] = -dot(&diffs[r], y0);
    }
    let diag_scale = (0..m).map(|r| a[r * (m + 1) + r]).fold(0.0f64, f64::max);
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i * (m + 1) + col].abs().total_cmp(&a[j * (m + 1) + col].abs()))
            .unwrap();
        if a[piv * (m + 1) + col].abs() <= 1e-13 * diag_scale {
            return None;
        }
        if piv != col {
            for c in 0..=m {
                a.swap(piv * (m + 1) + c, col * (m + 1) + c);
            }
        }
        for r in col + 1..m {
            let f = a[r * (m + 1) + col] / a[col * (m + 1) + col];
            for c in col..=m {
                a[r * (m + 1) + c] -= f * a[col * (m + 1) + c];
            }
        }
    }
    let mut lambda = vec![0.0; m];
    for r in (0..m).rev() {
        let mut s = a[r * (m + 1) + m];
        for c in r + 1..m {
            s -= a[r * (m + 1) + c] * lambda[c];
        }
        lambda[r] = s / a[r * (m + 1) + r];
    }
    let mut weights = Vec::with_capacity(m + 1);
    weights.push(1.0 - lambda.iter().sum::<f64>());
    weights.extend(lambda);
    Some(weights)
}

/// Hausdorff distance between `conv(inner) ⊆ conv(outer)`, realized at the
/// outer vertices.
pub fn hausdorff_nested(inner: &[f64], outer: &[f64], dim: usize) -> Result<f64> {
    if dim == 0 || outer.len() % dim != 0 {
        return Err(Error::arg("vertex coordinates do not match the dimension"));
    }
    let mut worst = 0.0f64;
    for v in outer.chunks_exact(dim) {
        worst = worst.max(distance_to_hull(v, inner)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn cube() -> Vec<f64> {
        (0..8)
            .flat_map(|i| [(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64])
            .collect()
    }

    #[test]
    fn inside_is_zero() {
        assert!(distance_to_hull(&[0.3, 0.6, 0.2], &cube()).unwrap() <= 1e-8);
    }

    #[test]
    fn segment_distance() {
        let d = distance_to_hull(&[0.5, 1.0], &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn face_edge_and_corner_distances() {
        let c = cube();
        assert!((distance_to_hull(&[2.0, 0.5, 0.5], &c).unwrap() - 1.0).abs() < 1e-8);
        assert!((distance_to_hull(&[2.0, 2.0, 0.5], &c).unwrap() - 2f64.sqrt()).abs() < 1e-8);
        assert!((distance_to_hull(&[-1.0, -1.0, -1.0], &c).unwrap() - 3f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn matches_brute_force_on_random_polygons() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..200 {
            let verts: Vec<f64> = (0..12).map(|_| rng.normal()).collect();
            let p = [3.0 * rng.normal(), 3.0 * rng.normal()];
            let gjk = distance_to_hull(&p, &verts).unwrap();
            let hull = crate::geometry::convex_hull(&verts, 2);
            let Ok(hull) = hull else { continue };
            let inside = hull.contains(&p, 0.0);
            let brute = if inside {
                0.0
            } else {
                hull.facets()
                    .iter()
                    .map(|f| {
                        let a = hull.point(f.vertex_indices[0]).unwrap();
                        let b = hull.point(f.vertex_indices[1]).unwrap();
                        segment_dist(&p, a, b)
                    })
                    .fold(f64::INFINITY, f64::min)
            };
            assert!((gjk - brute).abs() < 1e-8, "{gjk} vs {brute}");
        }
    }

    fn segment_dist(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let ab = [b[0] - a[0], b[1] - a[1]];
        let ap = [p[0] - a[0], p[1] - a[1]];
        let t = (dot(&ab, &ap) / dot(&ab, &ab)).clamp(0.0, 1.0);
        ((ap[0] - t * ab[0]).powi(2) + (ap[1] - t * ab[1]).powi(2)).sqrt()
    }

    #[test]
    fn concentric_squares() {
        let inner = [-0.5, -0.5, 0.5, -0.5, 0.5, 0.5, -0.5, 0.5];
        let outer: Vec<f64> = inner.iter().map(|x| 2.0 * x).collect();
        let h = hausdorff_nested(&inner, &outer, 2).unwrap();
        assert!((h - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(hausdorff_nested(&inner, &inner, 2).unwrap() <= 1e-8);
    }
}
