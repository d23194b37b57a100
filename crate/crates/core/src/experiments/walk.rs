//! One-dimensional stay-positive experiments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fmt_real;
use super::hull_stats::check_replicates;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{config_digest, EstimatorResult, Runner};
use crate::stochastic::{sample_bridge_1d, sample_path_until, sample_poisson_times};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkVariant {
    /// `1{B(t_i) > 0 for all Poisson t_i ≤ r}`.
    WalkPositive,
    /// `1{W(t_i) > 0 for all Poisson t_i < r}` for a bridge pinned at `r`.
    BridgePositive,
    /// `B(r) · 1{B(t_i) ≥ 0 for all t_i, and B(r) ≥ 0}`.
    EndpointExpectationIncl,
    /// `B(r) · 1{B(t_i) ≥ 0 for all t_i}`.
    EndpointExpectationExcl,
    /// Number of cyclic shifts of the discrete bridge that stay nonnegative.
    CyclicUniqueness,
}

impl WalkVariant {
    pub const ALL: [WalkVariant; 5] = [
        WalkVariant::WalkPositive,
        WalkVariant::BridgePositive,
        WalkVariant::EndpointExpectationIncl,
        WalkVariant::EndpointExpectationExcl,
        WalkVariant::CyclicUniqueness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WalkVariant::WalkPositive => "walk_positive",
            WalkVariant::BridgePositive => "bridge_positive",
            WalkVariant::EndpointExpectationIncl => "endpoint_expectation_incl",
            WalkVariant::EndpointExpectationExcl => "endpoint_expectation_excl",
            WalkVariant::CyclicUniqueness => "cyclic_uniqueness",
        }
    }
}

impl fmt::Display for WalkVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WalkVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|v| v.name()).collect();
                Error::arg(format!("unknown variant `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

fn one_replicate(variant: WalkVariant, r: f64, alpha: f64, rng: &mut RngStream) -> Result<f64> {
    let mut times = sample_poisson_times(alpha, r, rng)?;
    Ok(match variant {
        WalkVariant::WalkPositive => {
            let path = sample_path_until(&times, 1, r, rng)?;
            indicator(path.positions().iter().all(|&x| x > 0.0))
        }
        WalkVariant::BridgePositive | WalkVariant::CyclicUniqueness => {
            // A time exactly at r has probability zero; the bridge is pinned there.
            times.retain(|&t| t < r);
            let w = sample_bridge_1d(&times, r, rng)?;
            if variant == WalkVariant::BridgePositive {
                indicator(w.iter().all(|&x| x > 0.0))
            } else {
                cyclic_nonnegative_shifts(&w) as f64
            }
        }
        WalkVariant::EndpointExpectationIncl | WalkVariant::EndpointExpectationExcl => {
            if times.last() != Some(&r) {
                times.push(r);
            }
            let path = sample_path_until(&times, 1, r, rng)?;
            let values = path.positions();
            let end = *values.last().unwrap();
            let inner_ok = values[..values.len() - 1].iter().all(|&x| x >= 0.0);
            let ok = match variant {
                WalkVariant::EndpointExpectationIncl => inner_ok && end >= 0.0,
                _ => inner_ok,
            };
            if ok {
                end
            } else {
                0.0
            }
        }
    })
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// The bridge values with the pinned zero prepended form a cycle
/// `V_0 = 0, V_1, …, V_N`; restarting the cycle at `j` gives values
/// `V_k − V_j`, all nonnegative exactly when `V_j` is a minimum.
fn cyclic_nonnegative_shifts(bridge: &[f64]) -> usize {
    let min = bridge.iter().copied().fold(0.0f64, f64::min);
    usize::from(min == 0.0) + bridge.iter().filter(|&&x| x == min).count()
}

pub fn walk1d(
    runner: &Runner,
    variant: WalkVariant,
    r: f64,
    alpha: f64,
    replicates: u64,
    master_seed: u64,
) -> Result<EstimatorResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::arg(format!("r {r} must be finite and positive")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::arg(format!("alpha {alpha} must be finite and nonnegative")));
    }
    check_replicates(replicates)?;
    let digest = config_digest(&[
        ("op", "walk1d".to_string()),
        ("variant", variant.name().to_string()),
        ("r", fmt_real(r)),
        ("alpha", fmt_real(alpha)),
        ("replicates", replicates.to_string()),
        ("seed", master_seed.to_string()),
    ]);
    let values = runner.map(replicates, |i| one_replicate(variant, r, alpha, &mut RngStream::new(master_seed, i)))?;
    Ok(EstimatorResult::from_values(&values, master_seed, &digest))
}
