//! Monte Carlo evaluation of the two integrals without closed form: the
//! finite-intensity expected volume and the facet intensity of a shape class.

use serde::{Deserialize, Serialize};

use super::formulas::theorem1;
use super::laws::{endpoint_positive_expectation, phi};
use crate::error::{Error, Result};
use crate::geometry::{shape_class_member, ShapeClass};
use crate::rng::RngStream;
use crate::stats::Moments;

pub const MIN_MC_POINTS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// `E[Vol K_α]` from the gap-simplex integral, importance-sampled with
/// `r ~ Dirichlet(1, ½, …, ½)`. The Dirichlet normalizer times the leading
/// constant is the `α → ∞` volume, so only the bounded factor is averaged.
pub fn expected_volume_kalpha(n: u32, alpha: f64, mc_points: u64, rng: &mut RngStream) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::arg("dimension must be at least 2"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::arg(format!("alpha {alpha} must be finite and positive")));
    }
    if mc_points < MIN_MC_POINTS {
        return Err(Error::arg(format!("mc_points must be at least {MIN_MC_POINTS}")));
    }
    let prefactor = theorem1(n)?.volume;
    let n = n as usize;
    let mut gaps = vec![0.0; n + 1];
    let mut acc = Moments::default();
    for _ in 0..mc_points {
        gaps[0] = rng.exponential();
        for g in gaps.iter_mut().skip(1) {
            let z = rng.normal();
            *g = 0.5 * z * z;
        }
        let total: f64 = gaps.iter().sum();
        gaps.iter_mut().for_each(|g| *g /= total);
        acc.push(volume_integrand(&gaps, alpha)?);
    }
    Ok(McEstimate {
        estimate: prefactor * acc.mean(),
        stderr: prefactor * acc.stderr(),
        samples: acc.count(),
    })
}

/// Bounded factor of the volume integrand at gaps `(r_1, …, r_{n+1})`.
pub fn volume_integrand(gaps: &[f64], alpha: f64) -> Result<f64> {
    let n = gaps.len() - 1;
    let mut value = 1.0;
    for &r in &gaps[1..n] {
        value *= -(-alpha * r).exp_m1();
    }
    value *= phi(alpha * gaps[n])?;
    if gaps[0] > 0.0 {
        // erf(√(αr)) + (e^{−αr} − 1)/√(παr) = √(2α) · E[B(r)⁺; all points ≥ 0].
        value *= (2.0 * alpha).sqrt() * endpoint_positive_expectation(gaps[0], alpha)?;
    } else {
        value = 0.0;
    }
    Ok(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetIntensity {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub hits: u64,
    pub r_min: f64,
    pub r_max: f64,
}

/// Truncation box `[(m/(2n))² · 10⁻², (2M)²]` from the edge bounds of the
/// class at its scale.
pub fn default_truncation(n: usize, class: &ShapeClass) -> Result<(f64, f64)> {
    let (m, big) = class.edge_bounds();
    if !(m > 0.0) {
        return Err(Error::arg(
            "class members can have vanishing edges; supply r_min explicitly",
        ));
    }
    Ok(((m / (2.0 * n as f64)).powi(2) * 1e-2, (2.0 * big).powi(2)))
}

/// Expected number of facets of the limiting hull in `class`:
/// `2 ∫ Π_{j=2}^n r_j^{−1} P(X_r ∈ class) dr` over gap vectors with sum
/// below one, with each `r_j` drawn log-uniformly on `[r_min, r_max]`.
pub fn facet_intensity(
    n: usize,
    class: &ShapeClass,
    mc_points: u64,
    r_min: f64,
    r_max: f64,
    rng: &mut RngStream,
) -> Result<FacetIntensity> {
    if !(2..=5).contains(&n) {
        return Err(Error::UnsupportedDimension {
            dim: n,
            what: "facet intensity",
        });
    }
    if class.vertex_count() != n || class.dim() != n {
        return Err(Error::arg("class must hold simplices with n vertices in R^n"));
    }
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::arg(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if mc_points < MIN_MC_POINTS {
        return Err(Error::arg(format!("mc_points must be at least {MIN_MC_POINTS}")));
    }
    let log_range = (r_max / r_min).ln();
    let weight = 2.0 * log_range.powi(n as i32 - 1);
    let mut verts = vec![vec![0.0; n]; n];
    let mut acc = Moments::default();
    let mut hits = 0;
    let mut gaps = vec![0.0; n - 1];
    for _ in 0..mc_points {
        for g in gaps.iter_mut() {
            *g = r_min * (log_range * rng.uniform()).exp();
        }
        let mut value = 0.0;
        if gaps.iter().sum::<f64>() < 1.0 {
            for i in 1..n {
                let sd = gaps[i - 1].sqrt();
                for c in 0..n {
                    verts[i][c] = verts[i - 1][c] + sd * rng.normal();
                }
            }
            let refs: Vec<&[f64]> = verts.iter().map(|v| v.as_slice()).collect();
            if shape_class_member(&refs, class)? {
                value = weight;
                hits += 1;
            }
        }
        acc.push(value);
    }
    Ok(FacetIntensity {
        estimate: acc.mean(),
        stderr: acc.stderr(),
        samples: acc.count(),
        hits,
        r_min,
        r_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_alpha_recovers_limit_volume() {
        // The deficit at finite α is of order α^{−1/2}; with shared draws the
        // two-point extrapolation cancels it.
        let est = |alpha| expected_volume_kalpha(2, alpha, 200_000, &mut RngStream::new(21, 0)).unwrap();
        let (a, b) = (est(1e6), est(4e6));
        let target = theorem1(2).unwrap().volume;
        assert!(a.estimate < b.estimate && b.estimate < target + 3.0 * b.stderr);
        let limit = 2.0 * b.estimate - a.estimate;
        assert!((limit - target).abs() < 3.0 * (2.0 * b.stderr + a.stderr), "{limit}");
    }

    #[test]
    fn integrand_is_nonnegative() {
        let mut rng = RngStream::new(22, 0);
        for _ in 0..10_000 {
            let mut g: Vec<f64> = (0..4).map(|_| rng.exponential()).collect();
            let s: f64 = g.iter().sum();
            g.iter_mut().for_each(|x| *x /= s);
            let v = volume_integrand(&g, 50.0 * rng.uniform()).unwrap();
            assert!(v >= 0.0 && v <= 3.0);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = RngStream::new(0, 0);
        assert!(expected_volume_kalpha(2, 10.0, 99, &mut rng).is_err());
        assert!(expected_volume_kalpha(1, 10.0, 1000, &mut rng).is_err());
        let class = ShapeClass::equilateral(3, 1.0, 0.2, 0.1).unwrap();
        assert!(facet_intensity(3, &class, 1000, 0.1, 0.01, &mut rng).is_err());
        assert!(facet_intensity(4, &class, 1000, 0.01, 0.1, &mut rng).is_err());
    }

    #[test]
    fn unreachable_class_has_zero_intensity() {
        let mut rng = RngStream::new(23, 0);
        let class = ShapeClass::equilateral(3, 1.0, 0.2, 50.0).unwrap();
        let est = facet_intensity(3, &class, 20_000, 1e-4, 0.5, &mut rng).unwrap();
        assert_eq!(est.estimate, 0.0);
    }
}
