//! Volume and surface estimates of `K_α`, coupled α-sweeps and the
//! `a + b·α^{−1/2}` extrapolation.

use serde::{Deserialize, Serialize};

use super::{check_budget, fmt_real, fmt_reals};
use crate::closed_form::{theorem1, theorem2_bounds};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, simplex_measure};
use crate::rng::RngStream;
use crate::stats::{config_digest, EstimatorResult, Runner};
use crate::stochastic::{sample_path, sample_poisson_times, Rain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum VertexSet {
    /// `{B(t) : t ∈ Λ_α}`.
    #[default]
    Walk,
    /// The walk points together with `B(0) = 0`.
    WithOrigin,
}

impl VertexSet {
    pub fn name(self) -> &'static str {
        match self {
            VertexSet::Walk => "walk",
            VertexSet::WithOrigin => "walk+origin",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullStats {
    pub volume: EstimatorResult,
    pub surface: EstimatorResult,
    /// Replicates with fewer than `n + 1` points, left out of both estimates.
    pub skipped: u64,
}

/// Monte Carlo `E[Vol K_α]` and `E[S(K_α)]` from independent replicates.
pub fn estimate_hull_stats(
    runner: &Runner,
    n: usize,
    alpha: f64,
    replicates: u64,
    master_seed: u64,
    vertices: VertexSet,
) -> Result<HullStats> {
    check_budget(n, alpha)?;
    check_replicates(replicates)?;
    let digest = config_digest(&[
        ("op", "simulate".to_string()),
        ("n", n.to_string()),
        ("alpha", fmt_real(alpha)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
        ("vertices", vertices.name().to_string()),
    ]);
    let samples = runner.map(replicates, |i| {
        let mut rng = RngStream::new(master_seed, i);
        let times = sample_poisson_times(alpha, 1.0, &mut rng)?;
        if times.len() < n + 1 {
            return Ok(None);
        }
        let path = sample_path(&times, n, &mut rng)?;
        let mut coords = path.positions().to_vec();
        if vertices == VertexSet::WithOrigin {
            coords.extend(std::iter::repeat(0.0).take(n));
        }
        let hull = convex_hull(&coords, n)?;
        Ok(Some((hull.volume(), hull.surface_area())))
    })?;
    let used: Vec<(f64, f64)> = samples.iter().flatten().copied().collect();
    let skipped = replicates - used.len() as u64;
    let vols: Vec<f64> = used.iter().map(|s| s.0).collect();
    let surfs: Vec<f64> = used.iter().map(|s| s.1).collect();
    Ok(HullStats {
        volume: EstimatorResult::from_values(&vols, master_seed, &digest),
        surface: EstimatorResult::from_values(&surfs, master_seed, &digest),
        skipped,
    })
}

pub(crate) fn check_replicates(replicates: u64) -> Result<()> {
    if replicates < 2 {
        return Err(Error::arg("at least two replicates are required"));
    }
    Ok(())
}

pub(crate) fn check_ascending(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::arg("alpha list is empty"));
    }
    if alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::arg("alpha values must be finite and positive"));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("alpha list must be strictly ascending"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub alpha: f64,
    pub replicates: u64,
    pub vol_mean: f64,
    pub vol_stderr: f64,
    pub surf_mean: f64,
    pub surf_stderr: f64,
    pub closed_form_vol: f64,
    pub ratio: f64,
    pub deficit_bound: f64,
    pub ratio_upper_bound: Option<f64>,
    pub monotonicity_violations: u64,
}

impl SweepRow {
    pub const HEADER: [&'static str; 12] = [
        "n",
        "alpha",
        "replicates",
        "vol_mean",
        "vol_stderr",
        "surf_mean",
        "surf_stderr",
        "closed_form_vol",
        "ratio",
        "deficit_bound",
        "ratio_upper_bound",
        "monotonicity_violations",
    ];

    pub fn ratio_stderr(&self) -> f64 {
        self.vol_stderr / self.closed_form_vol
    }

    /// `1 − ratio ≤ deficit_bound` up to three standard errors.
    pub fn lower_bound_holds(&self) -> bool {
        self.ratio >= 1.0 - self.deficit_bound - 3.0 * self.ratio_stderr()
    }

    /// `ratio ≤ ratio_upper_bound` up to three standard errors, when the
    /// bound applies.
    pub fn upper_bound_holds(&self) -> Option<bool> {
        self.ratio_upper_bound
            .map(|b| self.ratio - 3.0 * self.ratio_stderr() <= b)
    }

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_real(self.alpha),
            self.replicates.to_string(),
            fmt_real(self.vol_mean),
            fmt_real(self.vol_stderr),
            fmt_real(self.surf_mean),
            fmt_real(self.surf_stderr),
            fmt_real(self.closed_form_vol),
            fmt_real(self.ratio),
            fmt_real(self.deficit_bound),
            self.ratio_upper_bound.map(fmt_real).unwrap_or_default(),
            self.monotonicity_violations.to_string(),
        ]
    }
}

/// Volume and surface of the hull of `coords` (flat, dimension `n`). Point
/// sets too small to span `R^n` are flat: volume 0, and surface twice the
/// facet measure when exactly `n` points remain.
pub(crate) fn flat_or_hull_measures(coords: &[f64], n: usize) -> Result<(f64, f64)> {
    let count = coords.len() / n;
    if count >= n + 1 {
        let h = convex_hull(coords, n)?;
        return Ok((h.volume(), h.surface_area()));
    }
    if count == n {
        let pts: Vec<&[f64]> = coords.chunks_exact(n).collect();
        return Ok((0.0, 2.0 * simplex_measure(&pts)));
    }
    Ok((0.0, 0.0))
}

/// Relative slack for comparing volumes of nested hulls.
const NESTING_SLACK: f64 = 1e-9;

/// Coupled sweep: one rain per replicate at `y_max = max α`, one path at all
/// rain times, each `K_α` sliced from it.
pub fn sweep_alpha(
    runner: &Runner,
    n: usize,
    alphas: &[f64],
    replicates: u64,
    master_seed: u64,
) -> Result<Vec<SweepRow>> {
    check_ascending(alphas)?;
    let y_max = *alphas.last().unwrap();
    check_budget(n, y_max)?;
    check_replicates(replicates)?;
    let digest = config_digest(&[
        ("op", "sweep-alpha".to_string()),
        ("n", n.to_string()),
        ("alphas", fmt_reals(alphas)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
    ]);
    let per_rep = runner.map(replicates, |i| {
        let mut rng = RngStream::new(master_seed, i);
        let rain = Rain::generate(y_max, &mut rng)?;
        let path = sample_path(&rain.times(), n, &mut rng)?;
        let mut out = Vec::with_capacity(alphas.len());
        for &a in alphas {
            let coords = path.gather(&rain.slice_indices(a)?);
            out.push(flat_or_hull_measures(&coords, n)?);
        }
        Ok(out)
    })?;
    let closed = theorem1(n as u32)?.volume;
    let mut rows = Vec::with_capacity(alphas.len());
    for (k, &a) in alphas.iter().enumerate() {
        let vols: Vec<f64> = per_rep.iter().map(|r| r[k].0).collect();
        let surfs: Vec<f64> = per_rep.iter().map(|r| r[k].1).collect();
        let violations = if k == 0 {
            0
        } else {
            per_rep
                .iter()
                .filter(|r| r[k].0 < r[k - 1].0 * (1.0 - NESTING_SLACK))
                .count() as u64
        };
        let v = EstimatorResult::from_values(&vols, master_seed, &digest);
        let s = EstimatorResult::from_values(&surfs, master_seed, &digest);
        let bounds = theorem2_bounds(n as u32, a)?;
        rows.push(SweepRow {
            n,
            alpha: a,
            replicates,
            vol_mean: v.mean,
            vol_stderr: v.stderr,
            surf_mean: s.mean,
            surf_stderr: s.stderr,
            closed_form_vol: closed,
            ratio: v.mean / closed,
            deficit_bound: bounds.deficit_bound,
            ratio_upper_bound: bounds.ratio_upper_bound,
            monotonicity_violations: violations,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    /// Fitted `a`, the `α → ∞` value.
    pub limit: f64,
    /// Standard error of `a`, treating the input means as independent.
    pub limit_stderr: f64,
    /// Fitted `b`.
    pub slope: f64,
}

/// Least-squares fit of `mean ≈ a + b·α^{−1/2}` over `(α, mean, stderr)`.
pub fn extrapolate_inv_sqrt(points: &[(f64, f64, f64)]) -> Result<Extrapolation> {
    if points.len() < 2 {
        return Err(Error::arg("extrapolation needs at least two alpha values"));
    }
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.0.sqrt()).collect();
    let m = points.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::arg("extrapolation needs distinct alpha values"));
    }
    // a = Σ w_i y_i with w_i = 1/m − x̄ (x_i − x̄)/Sxx.
    let weights: Vec<f64> = xs.iter().map(|x| 1.0 / m - xbar * (x - xbar) / sxx).collect();
    let limit = weights.iter().zip(points).map(|(w, p)| w * p.1).sum();
    let limit_stderr = weights
        .iter()
        .zip(points)
        .map(|(w, p)| (w * p.2).powi(2))
        .sum::<f64>()
        .sqrt();
    let slope = xs.iter().zip(points).map(|(x, p)| (x - xbar) * p.1).sum::<f64>() / sxx;
    Ok(Extrapolation {
        limit,
        limit_stderr,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_recovers_exact_model() {
        let pts: Vec<(f64, f64, f64)> = [100.0, 400.0, 1600.0]
            .iter()
            .map(|&a: &f64| (a, 2.0 - 3.0 / a.sqrt(), 0.01))
            .collect();
        let e = extrapolate_inv_sqrt(&pts).unwrap();
        assert!((e.limit - 2.0).abs() < 1e-12);
        assert!((e.slope + 3.0).abs() < 1e-12);
        assert!(e.limit_stderr > 0.01);
        assert!(extrapolate_inv_sqrt(&pts[..1]).is_err());
    }

    #[test]
    fn sweep_is_nested_and_deterministic() {
        let runner = Runner::serial();
        let rows = sweep_alpha(&runner, 2, &[5.0, 20.0, 80.0], 200, 4).unwrap();
        assert!(rows.iter().all(|r| r.monotonicity_violations == 0));
        assert!(rows[0].vol_mean < rows[2].vol_mean);
        let again = sweep_alpha(&Runner::new(3).unwrap(), 2, &[5.0, 20.0, 80.0], 200, 4).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn tiny_alpha_skips_everything() {
        let s = estimate_hull_stats(&Runner::serial(), 3, 1e-9, 50, 1, VertexSet::Walk).unwrap();
        assert_eq!(s.skipped, 50);
        assert!(s.volume.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let r = Runner::serial();
        assert!(matches!(
            estimate_hull_stats(&r, 4, 6e3, 10, 1, VertexSet::Walk),
            Err(Error::Budget(_))
        ));
        assert!(sweep_alpha(&r, 2, &[10.0, 5.0], 10, 1).is_err());
    }

    #[test]
    fn origin_only_enlarges() {
        let r = Runner::serial();
        let a = estimate_hull_stats(&r, 2, 50.0, 400, 9, VertexSet::Walk).unwrap();
        let b = estimate_hull_stats(&r, 2, 50.0, 400, 9, VertexSet::WithOrigin).unwrap();
        assert!(b.volume.mean > a.volume.mean);
    }
}
