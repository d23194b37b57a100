//! Monte Carlo experiments tying the sampled hulls to their closed forms.
//!
//! Every estimator derives replicate `i` from `RngStream::new(master_seed, i)`
//! and reduces per-replicate values in index order, so results do not depend
//! on the number of workers.

mod facets;
mod hull_stats;
mod intrinsic;
mod walk;

pub use facets::{
    census_monotonicity_violations, facet_census, facet_census_coupled, facet_event_experiment,
    gaussian_simplex_volume_mc, CensusLevel, FacetEvent,
};
pub use hull_stats::{
    estimate_hull_stats, extrapolate_inv_sqrt, sweep_alpha, Extrapolation, HullStats, SweepRow,
    VertexSet,
};
pub use intrinsic::{hausdorff_convergence, intrinsic_mc, kubota_constant, HausdorffRun, IntrinsicEstimate};
pub use walk::{walk1d, WalkVariant};

use crate::error::{Error, Result};

/// Largest expected point count per hull: `5·10⁴` for `n ≤ 3`, `5·10³` above.
pub fn point_budget(n: usize) -> f64 {
    if n <= 3 {
        5e4
    } else {
        5e3
    }
}

/// Rejects dimensions outside `2..=6` and intensities beyond the point budget.
pub fn check_budget(n: usize, alpha: f64) -> Result<()> {
    if !(2..=6).contains(&n) {
        return Err(Error::UnsupportedDimension {
            dim: n,
            what: "hull experiments (n in 2..=6)",
        });
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::arg(format!("alpha {alpha} must be finite and nonnegative")));
    }
    if alpha > point_budget(n) {
        return Err(Error::Budget(format!(
            "alpha {alpha} exceeds the {} expected points allowed in dimension {n}",
            point_budget(n)
        )));
    }
    Ok(())
}

/// Reals in output and digests: 17 significant digits, exponent form.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_reals(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(",")
}
