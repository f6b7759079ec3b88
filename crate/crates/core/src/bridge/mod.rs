//! Correspondence between wavefunctions and the first kinetic equation.
//!
//! Writing `Ψ = |Ψ| e^{iφ}`, the mean flux is `⟨u⟩ = −2α ∂_ηφ` and the
//! quantum potential `Q = α ∂²_η|Ψ| / (β |Ψ|)`. The residual checkers in
//! [`residual`] evaluate each governing equation by central differences.

mod fields;
mod residual;

use num_complex::Complex64;

pub use fields::{FieldScales, GaussianProfile, PlaneWave, WaveField};
pub use residual::{
    chain_steps, hamilton_jacobi_residual, motion_residual, schrodinger_residual, vlasov1_residual,
    vlasov_chain_residual, ChainSample, ResidualConfig, ResidualGrid, ResidualReport,
};

use crate::well::{PsiJet, WellParams};
use crate::{Error, Result, DENSITY_FLOOR};

/// Coefficients `(α, β, γ)` of the Schrödinger analog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub alpha: f64,
    pub betac: f64,
    pub gamma: f64,
}

impl CoefficientSet {
    pub fn new(alpha: f64, betac: f64, gamma: f64) -> Result<Self> {
        if betac == 0.0 || !betac.is_finite() {
            return Err(Error::InvalidArgument(
                "β coefficient must be non-zero".into(),
            ));
        }
        Ok(Self {
            alpha,
            betac,
            gamma,
        })
    }

    /// `α = −ħ/(2m)`, `β = 1/ħ`, `γ = −q/m` with `q = 0`.
    pub fn canonical(params: &WellParams) -> Self {
        Self {
            alpha: -params.hbar / (2.0 * params.m),
            betac: 1.0 / params.hbar,
            gamma: 0.0,
        }
    }

    /// `1/m = −2αβ`.
    pub fn inverse_mass(&self) -> f64 {
        -2.0 * self.alpha * self.betac
    }
}

/// How spatial derivatives of `Ψ` are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivatives {
    /// Use the field's analytic jet, falling back to differences with the
    /// given step if it has none.
    Analytic { fallback_h: f64 },
    /// Central differences with step `h`.
    FiniteDifference { h: f64 },
}

/// Jet by central differences: second order in `h` for every entry.
pub fn jet_fd(field: &dyn WaveField, eta: f64, tau: f64, h: f64, h_tau: f64) -> PsiJet {
    let p = |e: f64| field.psi(e, tau);
    let (m2, m1, c, p1, p2) = (
        p(eta - 2.0 * h),
        p(eta - h),
        p(eta),
        p(eta + h),
        p(eta + 2.0 * h),
    );
    PsiJet {
        psi: c,
        d_eta: (p1 - m1) / (2.0 * h),
        d2_eta: (p1 - 2.0 * c + m1) / (h * h),
        d3_eta: (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
        d_tau: (field.psi(eta, tau + h_tau) - field.psi(eta, tau - h_tau)) / (2.0 * h_tau),
    }
}

fn jet(field: &dyn WaveField, eta: f64, tau: f64, d: Derivatives) -> PsiJet {
    match d {
        Derivatives::Analytic { fallback_h } => field
            .jet(eta, tau)
            .unwrap_or_else(|| jet_fd(field, eta, tau, fallback_h, fallback_h)),
        Derivatives::FiniteDifference { h } => jet_fd(field, eta, tau, h, h),
    }
}

/// `−2α Im(Ψ* ∂_ηΨ)/|Ψ|²`; `None` where `|Ψ|²` is below the density floor.
pub fn flux_from_psi(
    field: &dyn WaveField,
    coeffs: &CoefficientSet,
    eta: f64,
    tau: f64,
    d: Derivatives,
) -> Option<f64> {
    let j = jet(field, eta, tau, d);
    let rho = j.psi.norm_sqr();
    (rho >= DENSITY_FLOOR).then(|| -2.0 * coeffs.alpha * (j.psi.conj() * j.d_eta).im / rho)
}

/// `|Ψ|''/|Ψ| = Re(Ψ*Ψ'')/|Ψ|² + (Im(Ψ*Ψ')/|Ψ|²)²`.
fn amplitude_curvature(j: &PsiJet) -> f64 {
    let rho = j.psi.norm_sqr();
    let grad = (j.psi.conj() * j.d_eta).im / rho;
    (j.psi.conj() * j.d2_eta).re / rho + grad * grad
}

/// `Q = α ∂²_η|Ψ| / (β |Ψ|)`; `None` where `|Ψ|²` is below the density floor.
pub fn quantum_potential(
    field: &dyn WaveField,
    coeffs: &CoefficientSet,
    eta: f64,
    tau: f64,
    d: Derivatives,
) -> Option<f64> {
    match d {
        Derivatives::FiniteDifference { h } => {
            let r = |e: f64| field.psi(e, tau).norm();
            let c = r(eta);
            (c * c >= DENSITY_FLOOR).then(|| {
                coeffs.alpha / coeffs.betac * (r(eta + h) - 2.0 * c + r(eta - h)) / (h * h * c)
            })
        }
        Derivatives::Analytic { .. } => {
            let j = jet(field, eta, tau, d);
            (j.psi.norm_sqr() >= DENSITY_FLOOR)
                .then(|| coeffs.alpha / coeffs.betac * amplitude_curvature(&j))
        }
    }
}

/// Removes `2π` jumps from a sampled phase so consecutive samples differ by
/// at most `π`.
pub fn unwrap_phase(phases: &[f64]) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    for (i, &p) in phases.iter().enumerate() {
        if i > 0 {
            let d = p - phases[i - 1];
            if d > PI {
                offset -= TAU * ((d - PI) / TAU).ceil();
            } else if d < -PI {
                offset += TAU * ((-d - PI) / TAU).ceil();
            }
        }
        out.push(p + offset);
    }
    out
}

/// Flux from the scalar potential `Φ = 2φ` on a uniform line of `η` samples:
/// `⟨u⟩ = −α ∂_ηΦ`, with `φ` unwrapped along the line. Interior samples
/// only (the first and last entries are `None`), and `None` wherever any
/// stencil point is below the density floor.
pub fn flux_from_potential_line(
    field: &dyn WaveField,
    coeffs: &CoefficientSet,
    etas: &[f64],
    tau: f64,
) -> Vec<Option<f64>> {
    let psis: Vec<Complex64> = etas.iter().map(|&e| field.psi(e, tau)).collect();
    let phi = unwrap_phase(&psis.iter().map(|p| p.arg()).collect::<Vec<_>>());
    let potential: Vec<f64> = phi.iter().map(|p| 2.0 * p).collect();
    (0..etas.len())
        .map(|i| {
            if i == 0 || i + 1 == etas.len() {
                return None;
            }
            let ok = psis[i - 1..=i + 1]
                .iter()
                .all(|p| p.norm_sqr() >= DENSITY_FLOOR);
            ok.then(|| {
                -coeffs.alpha * (potential[i + 1] - potential[i - 1]) / (etas[i + 1] - etas[i - 1])
            })
        })
        .collect()
}
