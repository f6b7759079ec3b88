//! Solutions of the free Schrödinger analog in an infinitely deep well.
//!
//! Inside `0 < η < a` the wavefunction obeys `iħ ∂_τΨ = −(ħ²/2m) ∂²_ηΨ` with
//! `Ψ(0) = Ψ(a) = 0`. Two families are provided: the stationary sine modes and
//! the theta-function family parameterised by an inverse temperature `β`.

mod params;
mod stationary;
mod theta;

pub use params::{energy, ModeConstants, WellParams};
pub use stationary::{density_stationary, psi_stationary, StationaryMode};
pub use theta::{
    chebyshev_t, half_period_flux_report, theta1, FluxParsing, HalfPeriodReport, PsiJet,
    ThetaSolution, TruncationMode, TruncationPolicy,
};
