//! Symbol error rate (SER) analysis for arbitrary real or complex
//! constellations under additive (compound) Gaussian noise with a
//! minimum-distance detector.
//!
//! The crate computes the SER three independent ways (Monte Carlo detector
//! simulation, Voronoi cone-decomposition quadrature and, where available,
//! closed forms), the Bernstein representing function of the SER, derivative
//! scans for complete monotonicity and convexity, and Laplace-transform style
//! stochastic orders between fading distributions.
//!
//! Noise convention used throughout: `z ~ N(0, I/rho)` per real dimension.

pub mod constellation;
pub mod error;
pub mod fading;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod noise;
pub mod numerics;
pub mod ser;

pub use constellation::{Constellation, ReducedConstellation, SnrPoint};
pub use error::{Error, Result};
