use num_complex::Complex64;

use super::{ModeConstants, WellParams};
use crate::Result;

/// `√(2/a) sin(λη) exp(−iEτ/ħ)`; the sine argument `√(2mE)/ħ·η` equals `λη`.
pub fn psi_stationary(
    eta: f64,
    tau: f64,
    mode: &ModeConstants,
    params: &WellParams,
) -> Result<Complex64> {
    params.check_inside(eta)?;
    let amp = (2.0 / params.a).sqrt() * (mode.lambda * eta).sin();
    Ok(Complex64::from_polar(1.0, -mode.energy * tau / params.hbar) * amp)
}

/// `(2/a) sin²(λη)`. The matching mean flux is identically zero.
pub fn density_stationary(eta: f64, mode: &ModeConstants, params: &WellParams) -> Result<f64> {
    params.check_inside(eta)?;
    Ok(2.0 / params.a * (mode.lambda * eta).sin().powi(2))
}

/// A stationary mode bundled with its well, for use as a field evaluator.
#[derive(Debug, Clone, Copy)]
pub struct StationaryMode {
    pub params: WellParams,
    pub mode: ModeConstants,
}

impl StationaryMode {
    pub fn new(params: WellParams, mu: u32) -> Result<Self> {
        Ok(Self {
            params,
            mode: ModeConstants::new(&params, mu)?,
        })
    }

    /// Density with the support cut-off: zero outside `[0, a]`.
    pub fn density_or_zero(&self, eta: f64) -> f64 {
        if (0.0..=self.params.a).contains(&eta) {
            2.0 / self.params.a * (self.mode.lambda * eta).sin().powi(2)
        } else {
            0.0
        }
    }
}
