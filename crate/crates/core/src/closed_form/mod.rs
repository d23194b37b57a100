//! Closed-form expectations and the special functions behind them.

mod formulas;
mod integrals;
mod laws;
mod quadrature;
pub mod special;

pub use formulas::{
    expected_facet_volume, facet_probability, facet_volume_height, facet_volume_mean,
    intrinsic_volume, theorem1, theorem2_bounds, xi, FacetProbability, HullExpectations,
    SimplexPoint, Theorem2Bounds,
};
pub use laws::{bridge_prob, endpoint_positive_expectation, phi, phi_psi, psi, PhiPsi};
pub use quadrature::Quadrature;
pub use integrals::{
    default_truncation, expected_volume_kalpha, facet_intensity, volume_integrand, FacetIntensity,
    McEstimate, MIN_MC_POINTS,
};
