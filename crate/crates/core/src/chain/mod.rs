//! Lifting characteristic-space solutions to `n`-th order phase space and
//! marginalising them back down.
//!
//! A solution `F(η, τ)` of the reduced first equation becomes
//! `f_n(ξ, t) = F(η_n(ξ, t), τ_n(t)) / Π_{l≥1} Δa^(l)` on the box of linear
//! sizes `Δa^(l)`. For `n = 2` the marginal density and mean velocity over
//! the velocity box are available in closed form, piecewise over the four
//! regions where the velocity limits change.

mod general;
mod lift;
mod marginal;
mod region;

pub use general::{marginalize_general, marginalize_separable, MarginalQuadrature};
pub use lift::{f_n_stationary, f_n_theta, CharacteristicDensity, LiftedStationary, LiftedTheta};
pub use marginal::{
    marginal, marginal_density, marginal_density_direct, marginal_flux, marginal_flux_direct,
    MarginalResult,
};
pub use region::{classify_region, polygon_area, support_polygon, Branch, BranchTag, PhaseBox};
