//! Intrinsic volumes through random projections, and Hausdorff convergence
//! of coupled hulls.

use serde::{Deserialize, Serialize};

use super::hull_stats::{check_ascending, check_replicates};
use super::{check_budget, fmt_real, fmt_reals};
use crate::closed_form::special::{binomial, unit_ball_volume};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, hausdorff_nested, random_orthonormal_frame};
use crate::rng::RngStream;
use crate::stats::{config_digest, EstimatorResult, Runner};
use crate::stochastic::{sample_path, sample_poisson_times, Rain};

/// `C(n, j) κ_n / (κ_j κ_{n−j})`.
pub fn kubota_constant(n: u32, j: u32) -> f64 {
    binomial(n, j) * unit_ball_volume(n) / (unit_ball_volume(j) * unit_ball_volume(n - j))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicEstimate {
    /// Kubota-scaled mean projection volume.
    pub value: EstimatorResult,
    pub skipped: u64,
}

/// `V_j(K_α)` as the Kubota constant times the mean `j`-volume of the
/// projection onto a uniformly random `j`-frame. For `j = n` no projection
/// is applied, so the samples match the plain hull volume estimate.
pub fn intrinsic_mc(
    runner: &Runner,
    n: usize,
    j: usize,
    alpha: f64,
    replicates: u64,
    master_seed: u64,
) -> Result<IntrinsicEstimate> {
    if j == 0 {
        return Err(Error::arg("j must be at least 1 (V_0 = 1)"));
    }
    if j > n || n > 5 {
        return Err(Error::arg(format!("need 1 ≤ j ≤ n ≤ 5, got n = {n}, j = {j}")));
    }
    check_budget(n.max(2), alpha)?;
    check_replicates(replicates)?;
    let digest = config_digest(&[
        ("op", "intrinsic".to_string()),
        ("n", n.to_string()),
        ("j", j.to_string()),
        ("alpha", fmt_real(alpha)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
    ]);
    let samples = runner.map(replicates, |i| {
        let mut rng = RngStream::new(master_seed, i);
        let times = sample_poisson_times(alpha, 1.0, &mut rng)?;
        if times.len() < n + 1 {
            return Ok(None);
        }
        let path = sample_path(&times, n, &mut rng)?;
        let volume = if j == n {
            convex_hull(path.positions(), n)?.volume()
        } else {
            let frame = random_orthonormal_frame(n, j, &mut rng)?;
            convex_hull(&frame.project(path.positions()), j)?.volume()
        };
        Ok(Some(volume))
    })?;
    let constant = kubota_constant(n as u32, j as u32);
    let values: Vec<f64> = samples.iter().flatten().map(|v| constant * v).collect();
    Ok(IntrinsicEstimate {
        skipped: replicates - values.len() as u64,
        value: EstimatorResult::from_values(&values, master_seed, &digest),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffRun {
    pub alphas: Vec<f64>,
    pub distances: Vec<EstimatorResult>,
    /// Replicate-level increases of the distance along ascending α.
    pub monotonicity_violations: u64,
}

/// Hausdorff distance of each coupled `K_α` to `K_{α_max}`.
pub fn hausdorff_convergence(
    runner: &Runner,
    n: usize,
    alphas: &[f64],
    replicates: u64,
    master_seed: u64,
) -> Result<HausdorffRun> {
    check_ascending(alphas)?;
    let y_max = *alphas.last().unwrap();
    check_budget(n, y_max)?;
    check_replicates(replicates)?;
    let digest = config_digest(&[
        ("op", "hausdorff".to_string()),
        ("n", n.to_string()),
        ("alphas", fmt_reals(alphas)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
    ]);
    let per_rep = runner.map(replicates, |i| {
        let mut rng = RngStream::new(master_seed, i);
        let rain = Rain::generate(y_max, &mut rng)?;
        let path = sample_path(&rain.times(), n, &mut rng)?;
        let vertex_sets: Vec<Vec<f64>> = alphas
            .iter()
            .map(|&a| {
                let coords = path.gather(&rain.slice_indices(a)?);
                if coords.is_empty() {
                    return Err(Error::arg(format!(
                        "no Poisson points at alpha {a}; increase the smallest alpha"
                    )));
                }
                Ok(if coords.len() / n > n {
                    convex_hull(&coords, n)?.vertex_coords().to_vec()
                } else {
                    coords
                })
            })
            .collect::<Result<_>>()?;
        let (reference, coarser) = vertex_sets.split_last().unwrap();
        let mut d = coarser
            .iter()
            .map(|inner| hausdorff_nested(inner, reference, n))
            .collect::<Result<Vec<f64>>>()?;
        d.push(0.0);
        Ok(d)
    })?;
    let mut distances = Vec::with_capacity(alphas.len());
    for k in 0..alphas.len() {
        let v: Vec<f64> = per_rep.iter().map(|r| r[k]).collect();
        distances.push(EstimatorResult::from_values(&v, master_seed, &digest));
    }
    let monotonicity_violations = per_rep
        .iter()
        .map(|r| r.windows(2).filter(|w| w[1] > w[0] + 1e-9).count() as u64)
        .sum();
    Ok(HausdorffRun {
        alphas: alphas.to_vec(),
        distances,
        monotonicity_violations,
    })
}
