use num_complex::Complex64;

use crate::well::{PsiJet, StationaryMode, ThetaSolution, WellParams};

/// Characteristic wavenumber and angular frequency of a field, used to pick
/// difference steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldScales {
    pub k: f64,
    pub omega: f64,
}

/// A complex field `Ψ(η, τ)`, evaluable slightly beyond its physical domain
/// so that difference stencils can straddle it.
pub trait WaveField: Sync {
    fn psi(&self, eta: f64, tau: f64) -> Complex64;

    /// Analytic derivatives, when the field has them.
    fn jet(&self, _eta: f64, _tau: f64) -> Option<PsiJet> {
        None
    }

    fn scales(&self) -> FieldScales;
}

impl WaveField for StationaryMode {
    fn psi(&self, eta: f64, tau: f64) -> Complex64 {
        let amp = (2.0 / self.params.a).sqrt() * (self.mode.lambda * eta).sin();
        Complex64::from_polar(1.0, -self.mode.energy * tau / self.params.hbar) * amp
    }

    fn jet(&self, eta: f64, tau: f64) -> Option<PsiJet> {
        let lam = self.mode.lambda;
        let c = (2.0 / self.params.a).sqrt();
        let omega = self.mode.energy / self.params.hbar;
        let e = Complex64::from_polar(1.0, -omega * tau);
        let (s, co) = (lam * eta).sin_cos();
        Some(PsiJet {
            psi: e * (c * s),
            d_eta: e * (c * lam * co),
            d2_eta: e * (-c * lam * lam * s),
            d3_eta: e * (-c * lam * lam * lam * co),
            d_tau: e * Complex64::new(0.0, -omega * c * s),
        })
    }

    fn scales(&self) -> FieldScales {
        FieldScales {
            k: self.mode.lambda,
            omega: self.mode.energy / self.params.hbar,
        }
    }
}

impl WaveField for ThetaSolution {
    fn psi(&self, eta: f64, tau: f64) -> Complex64 {
        self.psi_unchecked(eta, tau)
    }

    fn jet(&self, eta: f64, tau: f64) -> Option<PsiJet> {
        Some(self.psi_jet(eta, tau))
    }

    fn scales(&self) -> FieldScales {
        let k = self.significant_wavenumber(1e-8);
        let p = self.params();
        FieldScales {
            k,
            omega: p.hbar * k * k / (2.0 * p.m),
        }
    }
}

/// `e^{i(kη − ωτ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub k: f64,
    pub omega: f64,
}

impl PlaneWave {
    /// Free-particle dispersion `ω = ħk²/(2m)`.
    pub fn free(k: f64, params: &WellParams) -> Self {
        Self {
            k,
            omega: params.hbar * k * k / (2.0 * params.m),
        }
    }
}

impl WaveField for PlaneWave {
    fn psi(&self, eta: f64, tau: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.k * eta - self.omega * tau)
    }

    fn jet(&self, eta: f64, tau: f64) -> Option<PsiJet> {
        let p = self.psi(eta, tau);
        let ik = Complex64::new(0.0, self.k);
        Some(PsiJet {
            psi: p,
            d_eta: ik * p,
            d2_eta: ik * ik * p,
            d3_eta: ik * ik * ik * p,
            d_tau: Complex64::new(0.0, -self.omega) * p,
        })
    }

    fn scales(&self) -> FieldScales {
        FieldScales {
            k: self.k.abs().max(1.0),
            omega: self.omega.abs().max(1.0),
        }
    }
}

/// Real, time-independent `exp(−(η − c)²/(2σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    pub center: f64,
    pub sigma: f64,
}

impl WaveField for GaussianProfile {
    fn psi(&self, eta: f64, _tau: f64) -> Complex64 {
        let x = (eta - self.center) / self.sigma;
        Complex64::new((-0.5 * x * x).exp(), 0.0)
    }

    fn jet(&self, eta: f64, tau: f64) -> Option<PsiJet> {
        let g = self.psi(eta, tau).re;
        let s2 = self.sigma * self.sigma;
        let x = eta - self.center;
        let d1 = -x / s2 * g;
        let d2 = (x * x / s2 - 1.0) / s2 * g;
        let d3 = (3.0 * x / s2 - x * x * x / (s2 * s2)) / s2 * g;
        Some(PsiJet {
            psi: Complex64::new(g, 0.0),
            d_eta: Complex64::new(d1, 0.0),
            d2_eta: Complex64::new(d2, 0.0),
            d3_eta: Complex64::new(d3, 0.0),
            d_tau: Complex64::new(0.0, 0.0),
        })
    }

    fn scales(&self) -> FieldScales {
        FieldScales {
            k: 1.0 / self.sigma,
            omega: 1.0,
        }
    }
}
