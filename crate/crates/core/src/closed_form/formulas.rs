//! Closed-form expectations for the Brownian hull and its facets.

use std::f64::consts::PI;

use super::laws::{bridge_prob, endpoint_positive_expectation, psi};
use super::special::{binomial, ln_gamma};
use crate::error::{Error, Result};

/// Gap vector `(r₁, …, r_n)` with positive entries summing below one.
///
/// `r_{n+1} = 1 − Σ rᵢ` is the trailing gap and `s(r)` the cumulative sums,
/// i.e. the anchor times of a candidate facet.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    gaps: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(gaps: Vec<f64>) -> Result<Self> {
        if gaps.is_empty() {
            return Err(Error::arg("simplex point needs at least one gap"));
        }
        if gaps.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::arg(format!("gaps must be positive, got {gaps:?}")));
        }
        let total: f64 = gaps.iter().sum();
        if !(total < 1.0) {
            return Err(Error::arg(format!("gaps must sum below 1, got {total}")));
        }
        Ok(Self { gaps })
    }

    pub fn n(&self) -> usize {
        self.gaps.len()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// `rᵢ` with 1-based indexing; `i = n + 1` gives the trailing gap.
    pub fn r(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.n() + 1, "gap index {i} out of range");
        if i <= self.n() {
            self.gaps[i - 1]
        } else {
            self.trailing()
        }
    }

    pub fn trailing(&self) -> f64 {
        1.0 - self.gaps.iter().sum::<f64>()
    }

    /// Anchor times `s₁ < … < s_n`.
    pub fn anchors(&self) -> Vec<f64> {
        self.gaps
            .iter()
            .scan(0.0, |acc, g| {
                *acc += g;
                Some(*acc)
            })
            .collect()
    }

    /// The same point with `r₁` and `r_{n+1}` exchanged.
    pub fn reflected(&self) -> Result<Self> {
        let mut gaps = self.gaps.clone();
        gaps[0] = self.trailing();
        SimplexPoint::new(gaps)
    }
}

fn check_dim(n: u32, min: u32) -> Result<()> {
    if n < min {
        return Err(Error::arg(format!("dimension must be >= {min}, got {n}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullExpectations {
    pub volume: f64,
    pub surface: f64,
}

/// Expected volume `(π/2)^{n/2} / Γ(n/2+1)²` and surface area
/// `2 (2π)^{(n−1)/2} / Γ(n)` of the hull of Brownian motion on `[0, 1]`.
pub fn theorem1(n: u32) -> Result<HullExpectations> {
    check_dim(n, 2)?;
    let nf = n as f64;
    let volume = (nf / 2.0 * (PI / 2.0).ln() - 2.0 * ln_gamma(nf / 2.0 + 1.0)).exp();
    let surface = (2.0f64.ln() + (nf - 1.0) / 2.0 * (2.0 * PI).ln() - ln_gamma(nf)).exp();
    Ok(HullExpectations { volume, surface })
}

/// Expected `j`-th intrinsic volume,
/// `C(n,j) (π/2)^{j/2} Γ((n−j)/2+1) / (Γ(j/2+1) Γ(n/2+1))`.
pub fn intrinsic_volume(n: u32, j: u32) -> Result<f64> {
    check_dim(n, 1)?;
    if j < 1 || j > n {
        return Err(Error::arg(format!("need 1 <= j <= n, got j={j}, n={n}")));
    }
    let (nf, jf) = (n as f64, j as f64);
    let log = jf / 2.0 * (PI / 2.0).ln() + ln_gamma((nf - jf) / 2.0 + 1.0)
        - ln_gamma(jf / 2.0 + 1.0)
        - ln_gamma(nf / 2.0 + 1.0);
    Ok(binomial(n, j) * log.exp())
}

/// `ξ_n = 2^{n/2} Γ((n+1)/2) / (√π Γ(n))`.
pub fn xi(n: u32) -> f64 {
    let nf = n as f64;
    (nf / 2.0 * 2.0f64.ln() + ln_gamma((nf + 1.0) / 2.0) - ln_gamma(nf) - 0.5 * PI.ln()).exp()
}

/// Mean `(n−1)`-volume of the Gaussian simplex with increment variances
/// `increment_gaps = (r₂, …, r_n)`: `2^{(n−1)/2} Γ((n+1)/2) / Γ(n) · Π √rᵢ`.
/// Zero gaps give the degenerate value 0.
pub fn facet_volume_mean(increment_gaps: &[f64]) -> f64 {
    let n = increment_gaps.len() as f64 + 1.0;
    let constant = ((n - 1.0) / 2.0 * 2.0f64.ln() + ln_gamma((n + 1.0) / 2.0) - ln_gamma(n)).exp();
    constant * increment_gaps.iter().map(|r| r.max(0.0).sqrt()).product::<f64>()
}

/// Expected facet volume `E[V(r)]`; only `r₂, …, r_n` enter.
pub fn expected_facet_volume(r: &SimplexPoint) -> Result<f64> {
    check_dim(r.n() as u32, 2)?;
    Ok(facet_volume_mean(&r.gaps()[1..]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FacetProbability {
    pub value: f64,
    /// False when the raw formula exceeds 1, which happens for small `α rⱼ`
    /// where it is no longer a probability.
    pub is_probability: bool,
}

fn bridge_product(r: &SimplexPoint, alpha: f64) -> f64 {
    (2..=r.n()).map(|j| bridge_prob(alpha * r.r(j))).product()
}

/// Conditional probability that the anchor simplex `F_r` is a facet of `K_α`:
/// `2 Π_{j=2}^{n} (1 − e^{−α rⱼ})/(α rⱼ) · Ψ(α r₁) Ψ(α r_{n+1})`.
pub fn facet_probability(r: &SimplexPoint, alpha: f64) -> Result<FacetProbability> {
    check_dim(r.n() as u32, 2)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::arg(format!("alpha must be positive, got {alpha}")));
    }
    let value = 2.0 * bridge_product(r, alpha) * psi(alpha * r.r(1))? * psi(alpha * r.trailing())?;
    Ok(FacetProbability {
        value,
        is_probability: value <= 1.0,
    })
}

/// `E[V(r) H(r) 1_{E_α(r)} | W_α(r)]` assembled as
/// `2 E[V(r)] Π bridge · Ψ(α r_{n+1}) · E[B(r₁)⁺ 1_A]`.
pub fn facet_volume_height(r: &SimplexPoint, alpha: f64) -> Result<f64> {
    check_dim(r.n() as u32, 2)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::arg(format!("alpha must be positive, got {alpha}")));
    }
    Ok(2.0
        * expected_facet_volume(r)?
        * bridge_product(r, alpha)
        * psi(alpha * r.trailing())?
        * endpoint_positive_expectation(r.r(1), alpha)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem2Bounds {
    /// Bound on `1 − E[Vol K_α] / E[Vol K]`: `e^{−n} + 8 √(n³/α)`.
    pub deficit_bound: f64,
    /// `100 (α/n³) log²(n³/α)` when `α < n³/8`.
    pub ratio_upper_bound: Option<f64>,
}

pub fn theorem2_bounds(n: u32, alpha: f64) -> Result<Theorem2Bounds> {
    check_dim(n, 2)?;
    if !(alpha > 0.0) {
        return Err(Error::arg(format!("alpha must be positive, got {alpha}")));
    }
    let n3 = (n as f64).powi(3);
    let deficit_bound = (-(n as f64)).exp() + 8.0 * (n3 / alpha).sqrt();
    let ratio_upper_bound = (alpha < n3 / 8.0).then(|| {
        let l = (n3 / alpha).ln();
        100.0 * alpha / n3 * l * l
    });
    Ok(Theorem2Bounds {
        deficit_bound,
        ratio_upper_bound,
    })
}
