//! One-dimensional stay-positive laws for walks observed at Poisson times.

use std::f64::consts::{FRAC_PI_2, PI};

use super::quadrature::Quadrature;
use super::special::erf;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiPsi {
    pub phi: f64,
    pub psi: f64,
}

/// `Ψ(t)` and `Φ(t) = √(πt) Ψ(t)`.
///
/// `Ψ(t)` is the probability that a Brownian motion observed at the points
/// of a Poisson process of total mass `t` is positive at all of them. It is
/// evaluated as `(2/π) ∫₀^{π/2} exp(−t sin²θ) dθ`, which has a smooth
/// integrand, instead of the `1/√(1 − x²/t)` form.
pub fn phi_psi(t: f64, quad: &Quadrature) -> Result<PhiPsi> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::arg(format!("phi_psi needs finite t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(PhiPsi { phi: 0.0, psi: 1.0 });
    }
    // The integrand is concentrated in θ ≲ 1/√t; splitting there lets the
    // adaptive rule spend its nodes where the mass is.
    let knee = (8.0 / t.sqrt()).min(FRAC_PI_2);
    let scaled = Quadrature {
        abs_tol: quad.abs_tol * PI / 2.0,
        ..*quad
    };
    let f = |theta: f64| {
        let s = theta.sin();
        (-t * s * s).exp()
    };
    let (head, _) = scaled.integrate(f, 0.0, knee)?;
    let tail = if knee < FRAC_PI_2 {
        scaled.integrate(f, knee, FRAC_PI_2)?.0
    } else {
        0.0
    };
    let psi = 2.0 / PI * (head + tail);
    Ok(PhiPsi {
        phi: (PI * t).sqrt() * psi,
        psi,
    })
}

pub fn psi(t: f64) -> Result<f64> {
    phi_psi(t, &Quadrature::default()).map(|v| v.psi)
}

pub fn phi(t: f64) -> Result<f64> {
    phi_psi(t, &Quadrature::default()).map(|v| v.phi)
}

/// Probability that a Brownian bridge observed at Poisson points of total
/// mass `x` stays nonnegative: `(1 − e^{−x}) / x`, equal to 1 at `x = 0`.
pub fn bridge_prob(x: f64) -> f64 {
    if x < 1e-8 {
        1.0 - x / 2.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `E[B(r) 1{B(r) ≥ 0} 1{B(tᵢ) ≥ 0 ∀i}]` for Poisson times of intensity `alpha` on `[0, r]`:
/// `erf(√(αr))/√(2α) + (e^{−αr} − 1)/(√(2πr) α)`.
///
/// Written as `√(r/2π) · f(z)` with `z² = αr` and
/// `f(z) = √π erf(z)/z − (1 − e^{−z²})/z²`, which is expanded in series for
/// small `z` to avoid cancellation; `f(0) = 1`.
pub fn endpoint_positive_expectation(r: f64, alpha: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::arg(format!("r must be positive, got {r}")));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::arg(format!("alpha must be >= 0, got {alpha}")));
    }
    let u = alpha * r;
    let f = if u < 0.5 {
        // Σ (−u)ᵏ [2/(k!(2k+1)) − 1/(k+1)!]
        let mut sum = 0.0;
        let mut fact = 1.0; // k!
        let mut pow = 1.0; // (−u)ᵏ
        for k in 0..40 {
            let kf = k as f64;
            if k > 0 {
                fact *= kf;
                pow *= -u;
            }
            let term = pow * (2.0 / (fact * (2.0 * kf + 1.0)) - 1.0 / (fact * (kf + 1.0)));
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        let z = u.sqrt();
        PI.sqrt() * erf(z) / z + (-u).exp_m1() / u
    };
    Ok((r / (2.0 * PI)).sqrt() * f)
}
