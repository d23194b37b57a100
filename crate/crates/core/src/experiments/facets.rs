//! Conditioned facet events, Gaussian facet simplices and the facet census.

use serde::{Deserialize, Serialize};

use super::hull_stats::{check_ascending, check_replicates};
use super::{check_budget, fmt_real, fmt_reals};
use crate::closed_form::SimplexPoint;
use crate::error::{Error, Result};
use crate::geometry::linalg::{cross_normal, dot};
use crate::geometry::{convex_hull, shape_class_member, simplex_measure, ShapeClass};
use crate::rng::RngStream;
use crate::stats::{combined_stderr, config_digest, EstimatorResult, Runner};
use crate::stochastic::{condition_insert, sample_path, sample_poisson_times, Rain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetEvent {
    /// Frequency of the event that the anchor simplex is a facet.
    pub prob: EstimatorResult,
    /// Mean of `V · H · 1{facet of the walk together with the origin}`,
    /// `V` the anchor simplex measure and `H` the origin's distance to its plane.
    pub vh: EstimatorResult,
}

/// `Some(+1)` if every projection is at least `offset − tol`, `Some(−1)` if
/// every one is at most `offset + tol`, `None` otherwise.
fn one_sided(offset: f64, projections: impl Iterator<Item = f64>, tol: f64) -> Option<f64> {
    let mut below = false;
    let mut above = false;
    for p in projections {
        let s = p - offset;
        below |= s < -tol;
        above |= s > tol;
        if below && above {
            return None;
        }
    }
    Some(if above { 1.0 } else { -1.0 })
}

/// Conditions on the anchor times `s(r)` belonging to the Poisson process and
/// tests whether `B(s(r))` spans a facet of the walk's hull.
pub fn facet_event_experiment(
    runner: &Runner,
    n: usize,
    r: &SimplexPoint,
    alpha: f64,
    replicates: u64,
    master_seed: u64,
) -> Result<FacetEvent> {
    if !(2..=3).contains(&n) || r.n() != n {
        return Err(Error::UnsupportedDimension {
            dim: n,
            what: "facet event experiment (n in {2, 3}, matching the gap vector)",
        });
    }
    let min_gap = (1..=n + 1).map(|i| r.r(i)).fold(f64::INFINITY, f64::min);
    if !(alpha > 0.0 && alpha.is_finite()) || alpha * min_gap < 1.0 {
        return Err(Error::arg(format!(
            "alpha · min gap = {} is below 1; the closed form is compared only for alpha ≥ {}",
            alpha * min_gap,
            1.0 / min_gap
        )));
    }
    check_replicates(replicates)?;
    let digest = config_digest(&[
        ("op", "facet-prob".to_string()),
        ("n", n.to_string()),
        ("r", fmt_reals(r.gaps())),
        ("alpha", fmt_real(alpha)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
    ]);
    let anchors = r.anchors();
    let samples = runner.map(replicates, |i| {
        let mut rng = RngStream::new(master_seed, i);
        let base = sample_poisson_times(alpha, 1.0, &mut rng)?;
        let merged = condition_insert(&base, &anchors)?;
        let times: Vec<f64> = merged.iter().map(|m| m.t).collect();
        let path = sample_path(&times, n, &mut rng)?;
        let anchor_pts: Vec<&[f64]> = merged
            .iter()
            .enumerate()
            .filter(|(_, m)| m.anchor)
            .map(|(k, _)| path.position(k))
            .collect();
        let mut normal = vec![0.0; n];
        cross_normal(&anchor_pts, &mut normal);
        let len = dot(&normal, &normal).sqrt();
        normal.iter_mut().for_each(|x| *x /= len);
        let offset = dot(&normal, anchor_pts[0]);
        let scale = path.positions().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-9 * (1.0 + scale);
        let others = merged
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.anchor)
            .map(|(k, _)| dot(&normal, path.position(k)));
        let Some(side) = one_sided(offset, others, tol) else {
            return Ok((0.0, 0.0));
        };
        // The walk lies on `side`; the origin must too for the cone term.
        let origin_side = -offset;
        let vh = if origin_side * side >= -tol {
            simplex_measure(&anchor_pts) * offset.abs()
        } else {
            0.0
        };
        Ok((1.0, vh))
    })?;
    let probs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let vhs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(FacetEvent {
        prob: EstimatorResult::from_values(&probs, master_seed, &digest),
        vh: EstimatorResult::from_values(&vhs, master_seed, &digest),
    })
}

/// Vertices `0, √r₂Γ₁, √r₂Γ₁ + √r₃Γ₂, …` in `R^n` (flat), for increment gaps
/// `(r₂, …, r_n)`.
pub(crate) fn gaussian_simplex(n: usize, increment_gaps: &[f64], rng: &mut RngStream, out: &mut Vec<f64>) {
    out.clear();
    out.resize(n * n, 0.0);
    for (i, &g) in increment_gaps.iter().enumerate() {
        let sd = g.sqrt();
        for c in 0..n {
            out[(i + 1) * n + c] = out[i * n + c] + sd * rng.normal();
        }
    }
}

/// Mean `(n−1)`-measure of the Gaussian simplex with the given increment gaps.
pub fn gaussian_simplex_volume_mc(
    runner: &Runner,
    n: usize,
    increment_gaps: &[f64],
    replicates: u64,
    master_seed: u64,
) -> Result<EstimatorResult> {
    if n < 2 || increment_gaps.len() != n - 1 {
        return Err(Error::arg("need n ≥ 2 and n − 1 increment gaps"));
    }
    if increment_gaps.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
        return Err(Error::arg("increment gaps must be finite and nonnegative"));
    }
    check_replicates(replicates)?;
    let digest = config_digest(&[
        ("op", "facet-volume".to_string()),
        ("n", n.to_string()),
        ("gaps", fmt_reals(increment_gaps)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
    ]);
    let values = runner.map(replicates, |i| {
        let mut rng = RngStream::new(master_seed, i);
        let mut v = Vec::new();
        gaussian_simplex(n, increment_gaps, &mut rng, &mut v);
        let pts: Vec<&[f64]> = v.chunks_exact(n).collect();
        Ok(simplex_measure(&pts))
    })?;
    Ok(EstimatorResult::from_values(&values, master_seed, &digest))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusLevel {
    pub alpha: f64,
    pub scales: Vec<f64>,
    /// Facets of `K_α` in the class at each scale, per replicate mean.
    pub counts: Vec<EstimatorResult>,
    /// Adjacent scale pairs whose estimates increase by more than three
    /// combined standard errors.
    pub monotonicity_violations: u64,
}

/// Facet census of `K_α` for each `α` in `alphas`, all sliced from one rain
/// per replicate.
pub fn facet_census_coupled(
    runner: &Runner,
    n: usize,
    alphas: &[f64],
    class: &ShapeClass,
    scales: &[f64],
    replicates: u64,
    master_seed: u64,
) -> Result<Vec<CensusLevel>> {
    if n != 3 {
        return Err(Error::UnsupportedDimension {
            dim: n,
            what: "facet census (n = 3)",
        });
    }
    if class.vertex_count() != n || class.dim() != n {
        return Err(Error::arg("class must hold triangles in R^3"));
    }
    check_ascending(alphas)?;
    if scales.is_empty() || scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::arg("scales must be a nonempty list of positive reals"));
    }
    let y_max = *alphas.last().unwrap();
    check_budget(n, y_max)?;
    check_replicates(replicates)?;
    let classes: Vec<ShapeClass> = scales.iter().map(|&t| class.with_scale(t)).collect::<Result<_>>()?;
    let digest = config_digest(&[
        ("op", "facet-census".to_string()),
        ("n", n.to_string()),
        ("alphas", fmt_reals(alphas)),
        ("epsilon", fmt_real(class.epsilon())),
        ("target", fmt_reals(&class.target().concat())),
        ("scales", fmt_reals(scales)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
    ]);
    // Edge-length window of any member at any scale, for a cheap prefilter.
    let (lo, hi) = classes.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
        let (m, big) = c.edge_bounds();
        (lo.min(m), hi.max(big))
    });
    let per_rep = runner.map(replicates, |i| {
        let mut rng = RngStream::new(master_seed, i);
        let rain = Rain::generate(y_max, &mut rng)?;
        let path = sample_path(&rain.times(), n, &mut rng)?;
        let mut counts = vec![vec![0u32; scales.len()]; alphas.len()];
        for (k, &a) in alphas.iter().enumerate() {
            let coords = path.gather(&rain.slice_indices(a)?);
            if coords.len() / n < n + 1 {
                continue;
            }
            let hull = convex_hull(&coords, n)?;
            for f in hull.facets() {
                let pts = hull.facet_points(f);
                let edges_ok = (0..n).all(|a| {
                    (a + 1..n).all(|b| {
                        let e = pts[a].iter().zip(pts[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                        e >= lo && e <= hi
                    })
                });
                if !edges_ok {
                    continue;
                }
                for (s, c) in classes.iter().enumerate() {
                    if shape_class_member(&pts, c)? {
                        counts[k][s] += 1;
                    }
                }
            }
        }
        Ok(counts)
    })?;
    let mut levels = Vec::with_capacity(alphas.len());
    for (k, &a) in alphas.iter().enumerate() {
        let counts: Vec<EstimatorResult> = (0..scales.len())
            .map(|s| {
                let v: Vec<f64> = per_rep.iter().map(|r| r[k][s] as f64).collect();
                EstimatorResult::from_values(&v, master_seed, &digest)
            })
            .collect();
        let monotonicity_violations = census_monotonicity_violations(scales, &counts);
        levels.push(CensusLevel {
            alpha: a,
            scales: scales.to_vec(),
            counts,
            monotonicity_violations,
        });
    }
    Ok(levels)
}

/// Adjacent pairs (in ascending scale) with `count(t′) > count(t) + 3σ`.
pub fn census_monotonicity_violations(scales: &[f64], counts: &[EstimatorResult]) -> u64 {
    let mut order: Vec<usize> = (0..scales.len()).collect();
    order.sort_by(|&a, &b| scales[a].total_cmp(&scales[b]));
    order
        .windows(2)
        .filter(|w| {
            let (a, b) = (&counts[w[0]], &counts[w[1]]);
            b.mean > a.mean + 3.0 * combined_stderr(a.stderr, b.stderr)
        })
        .count() as u64
}

pub fn facet_census(
    runner: &Runner,
    n: usize,
    alpha: f64,
    class: &ShapeClass,
    scales: &[f64],
    replicates: u64,
    master_seed: u64,
) -> Result<CensusLevel> {
    let mut levels = facet_census_coupled(runner, n, &[alpha], class, scales, replicates, master_seed)?;
    Ok(levels.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{facet_probability, facet_volume_mean};

    #[test]
    fn regime_is_enforced() {
        let r = SimplexPoint::new(vec![0.3, 0.4]).unwrap();
        assert!(facet_event_experiment(&Runner::serial(), 2, &r, 2.0, 10, 1).is_err());
        assert!(facet_event_experiment(&Runner::serial(), 3, &r, 10.0, 10, 1).is_err());
    }

    #[test]
    fn facet_probability_small_run() {
        let r = SimplexPoint::new(vec![0.3, 0.4]).unwrap();
        let e = facet_event_experiment(&Runner::serial(), 2, &r, 10.0, 20_000, 2).unwrap();
        let p = facet_probability(&r, 10.0).unwrap().value;
        assert!((e.prob.mean - p).abs() < 4.0 * e.prob.stderr, "{} vs {p}", e.prob.mean);
    }

    #[test]
    fn gaussian_simplex_mean_measure() {
        let e = gaussian_simplex_volume_mc(&Runner::serial(), 2, &[1.0], 100_000, 3).unwrap();
        assert!(e.within(facet_volume_mean(&[1.0]), 4.0));
        assert!(gaussian_simplex_volume_mc(&Runner::serial(), 3, &[0.2], 10, 3).is_err());
    }

    #[test]
    fn zero_epsilon_census_is_empty() {
        let class = ShapeClass::equilateral(3, 1.0, 0.0, 1.0).unwrap();
        let c = facet_census(&Runner::serial(), 3, 300.0, &class, &[0.05, 0.1], 20, 4).unwrap();
        assert!(c.counts.iter().all(|e| e.mean == 0.0));
    }
}
