//! Convex hulls of multidimensional Brownian motion sampled at Poisson times:
//! closed-form expectations, Monte Carlo estimators, and the hull geometry
//! they rest on.

pub mod acceptance;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod rng;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};
pub use rng::RngStream;
