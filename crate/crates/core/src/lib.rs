//! Exact characteristic solutions of the Vlasov chain of kinetic equations.
//!
//! The crate is organised bottom-up:
//!
//! - [`characteristics`]: the characteristic coordinate `η_n`, the time
//!   parameter `τ_n`, hyperplane normals and the truncated Taylor propagator.
//! - [`well`]: solutions of the free Schrödinger analog in an infinite well,
//!   both the stationary sine modes and the theta-function "Dirac comb".
//! - [`chain`]: lifting those solutions to `n`-th order phase space and
//!   marginalising back down to densities and mean fluxes.
//! - [`bridge`]: flux / quantum potential extraction from a wavefunction and
//!   finite-difference residual checks for every governing equation.
//! - [`verify`]: the aggregated verification suite.
//!
//! [`quadrature`] holds the Gauss–Legendre and periodic trapezoid rules used
//! both by the general marginaliser and by the test oracles.

pub mod bridge;
pub mod chain;
pub mod characteristics;
mod error;
pub mod quadrature;
pub mod verify;
pub mod well;

pub use error::{Error, Result};

/// Density below which ratios such as mean fluxes are reported as undefined.
pub const DENSITY_FLOOR: f64 = 1e-12;
