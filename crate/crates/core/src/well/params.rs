use std::f64::consts::PI;

use crate::{Error, Result};

/// Physical constants of the well: mass, action constant and width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellParams {
    pub m: f64,
    pub hbar: f64,
    pub a: f64,
}

impl WellParams {
    pub fn new(m: f64, hbar: f64, a: f64) -> Result<Self> {
        for (name, value) in [("m", m), ("hbar", hbar), ("a", a)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositive { name, value });
            }
        }
        Ok(Self { m, hbar, a })
    }

    /// Returns an error if `eta` is outside `[0, a]`.
    pub(crate) fn check_inside(&self, eta: f64) -> Result<()> {
        if (0.0..=self.a).contains(&eta) {
            Ok(())
        } else {
            Err(Error::OutsideWell { eta, width: self.a })
        }
    }
}

impl Default for WellParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            hbar: 1.0,
            a: 0.5,
        }
    }
}

/// Per-mode derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeConstants {
    pub mu: u32,
    /// Wavenumber `πμ/a`.
    pub lambda: f64,
    /// Energy `π²ħ²μ²/(2ma²)`.
    pub energy: f64,
    /// `ħ²μ²/(2ma²)`, so that `energy = π² eps`.
    pub eps: f64,
    /// Revival period `ma²/(2πħμ²)`.
    pub period: f64,
}

impl ModeConstants {
    pub fn new(params: &WellParams, mu: u32) -> Result<Self> {
        if mu == 0 {
            return Err(Error::InvalidMode);
        }
        let WellParams { m, hbar, a } = *params;
        let mu_f = mu as f64;
        let eps = hbar * hbar * mu_f * mu_f / (2.0 * m * a * a);
        Ok(Self {
            mu,
            lambda: PI * mu_f / a,
            energy: PI * PI * eps,
            eps,
            period: m * a * a / (2.0 * PI * hbar * mu_f * mu_f),
        })
    }
}

/// `E_μ` of a mode.
pub fn energy(mode: &ModeConstants) -> f64 {
    mode.energy
}
