//! Translation classes of simplices and the matching-based membership test.

use itertools::Itertools;

use super::linalg::norm;
use crate::error::{Error, Result};

/// Largest vertex count for which all matchings are enumerated.
pub const MAX_MATCHED_VERTICES: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeClass {
    target: Vec<Vec<f64>>,
    epsilon: f64,
    scale: f64,
}

impl ShapeClass {
    /// Centers and sorts `target`; rejects `epsilon` at or above the
    /// shortest target edge.
    pub fn new(target: Vec<Vec<f64>>, epsilon: f64, scale: f64) -> Result<Self> {
        let k = target.len();
        if k < 2 {
            return Err(Error::arg("a shape class needs at least two target vertices"));
        }
        let dim = target[0].len();
        if target.iter().any(|v| v.len() != dim) || dim == 0 {
            return Err(Error::arg("target vertices have mixed dimensions"));
        }
        if k > MAX_MATCHED_VERTICES {
            return Err(Error::UnsupportedDimension {
                dim: k,
                what: "shape class matching",
            });
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::arg("epsilon must be finite and nonnegative"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::arg("scale must be finite and positive"));
        }
        let mut target = centered(&target);
        target.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let class = Self {
            target,
            epsilon,
            scale,
        };
        let (shortest, _) = class.target_edge_range();
        if epsilon >= shortest {
            return Err(Error::arg(format!(
                "epsilon {epsilon} must be below the shortest target edge {shortest}"
            )));
        }
        Ok(class)
    }

    /// Regular simplex with `vertices` vertices in `R^vertices`, all edges `edge`.
    pub fn equilateral(vertices: usize, edge: f64, epsilon: f64, scale: f64) -> Result<Self> {
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(Error::arg("edge must be finite and positive"));
        }
        let s = edge / 2f64.sqrt();
        let target = (0..vertices)
            .map(|i| (0..vertices).map(|c| if c == i { s } else { 0.0 }).collect())
            .collect();
        Self::new(target, epsilon, scale)
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        Self::new(self.target.clone(), self.epsilon, scale)
    }

    pub fn target(&self) -> &[Vec<f64>] {
        &self.target
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.target[0].len()
    }

    pub fn vertex_count(&self) -> usize {
        self.target.len()
    }

    fn target_edge_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (a, b) in self.target.iter().tuple_combinations() {
            let e = dist(a, b);
            lo = lo.min(e);
            hi = hi.max(e);
        }
        (lo, hi)
    }

    /// Bounds `(m, M)` on every edge of every member at the current scale.
    pub fn edge_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.target_edge_range();
        (
            self.scale * (lo - 2.0 * self.epsilon).max(0.0),
            self.scale * (hi + 2.0 * self.epsilon),
        )
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn centered(vertices: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = vertices[0].len();
    let k = vertices.len() as f64;
    let c: Vec<f64> = (0..dim)
        .map(|i| vertices.iter().map(|v| v[i]).sum::<f64>() / k)
        .collect();
    vertices
        .iter()
        .map(|v| v.iter().zip(&c).map(|(x, m)| x - m).collect())
        .collect()
}

/// Whether the simplex lies in the class: after centering both, some vertex
/// matching keeps every vertex within `scale · epsilon` of its partner.
pub fn shape_class_member(simplex: &[&[f64]], class: &ShapeClass) -> Result<bool> {
    let k = simplex.len();
    if k > MAX_MATCHED_VERTICES {
        return Err(Error::UnsupportedDimension {
            dim: k,
            what: "shape class matching",
        });
    }
    if k != class.vertex_count() || simplex.iter().any(|v| v.len() != class.dim()) {
        return Err(Error::arg("simplex does not match the class's vertex count and dimension"));
    }
    let owned: Vec<Vec<f64>> = simplex.iter().map(|v| v.to_vec()).collect();
    let verts = centered(&owned);
    let radius = class.scale * class.epsilon;
    let mut diff = vec![0.0; class.dim()];
    let within = |v: &[f64], t: &[f64], diff: &mut [f64]| {
        for ((d, a), b) in diff.iter_mut().zip(v).zip(t) {
            *d = a - class.scale * b;
        }
        norm(diff) <= radius
    };
    Ok((0..k).permutations(k).any(|perm| {
        perm.iter()
            .enumerate()
            .all(|(i, &p)| within(&verts[i], &class.target[p], &mut diff))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(|x| x.as_slice()).collect()
    }

    #[test]
    fn target_is_centered_and_sorted() {
        let c = ShapeClass::equilateral(3, 1.0, 0.2, 1.0).unwrap();
        for i in 0..3 {
            let s: f64 = c.target().iter().map(|v| v[i]).sum();
            assert!(s.abs() < 1e-12);
        }
        assert!(c.target().windows(2).all(|w| w[0] <= w[1]));
        let (m, big) = c.target_edge_range();
        assert!((m - 1.0).abs() < 1e-12 && (big - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translated_scaled_target_is_member() {
        let c = ShapeClass::equilateral(3, 1.0, 0.05, 0.4).unwrap();
        let shifted: Vec<Vec<f64>> = c
            .target()
            .iter()
            .rev()
            .map(|v| v.iter().enumerate().map(|(i, x)| 0.4 * x + [3.0, -7.5, 0.25][i]).collect())
            .collect();
        assert!(shape_class_member(&as_refs(&shifted), &c).unwrap());
    }

    #[test]
    fn equilateral_triangle_is_member() {
        let s = 1.0 / 2f64.sqrt();
        let tri = vec![vec![s, 0.0, 0.0], vec![0.0, s, 0.0], vec![0.0, 0.0, s]];
        let c = ShapeClass::equilateral(3, 1.0, 0.2, 1.0).unwrap();
        assert!(shape_class_member(&as_refs(&tri), &c).unwrap());
    }

    #[test]
    fn collinear_triangle_is_not_member() {
        let c = ShapeClass::equilateral(3, 1.0, 0.45, 1.0).unwrap();
        let tri = vec![vec![0.0, 0.0, 0.0], vec![0.5, 0.5, 0.0], vec![1.0, 1.0, 0.0]];
        assert!(!shape_class_member(&as_refs(&tri), &c).unwrap());
    }

    #[test]
    fn zero_epsilon_rejects_perturbations() {
        let c = ShapeClass::equilateral(3, 1.0, 0.0, 1.0).unwrap();
        let mut tri: Vec<Vec<f64>> = c.target().to_vec();
        tri[0][0] += 1e-6;
        assert!(!shape_class_member(&as_refs(&tri), &c).unwrap());
    }

    #[test]
    fn oversized_classes_are_rejected() {
        assert!(ShapeClass::equilateral(3, 1.0, 1.0, 1.0).is_err());
        assert!(matches!(
            ShapeClass::equilateral(6, 1.0, 0.1, 1.0),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(ShapeClass::equilateral(3, 1.0, 0.1, 0.0).is_err());
    }
}
