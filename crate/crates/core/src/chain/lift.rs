use super::PhaseBox;
use crate::characteristics::{eta_1d, tau, PhasePoint};
use crate::well::{ModeConstants, ThetaSolution};
use crate::{Error, Result};

/// A phase-space density written in characteristic variables,
/// `f_n(ξ, t) = G(η_n(ξ, t), τ_n(t))`, including the box normalisation.
pub trait CharacteristicDensity: Sync {
    /// Phase-space order `n` of the lifted density.
    fn order(&self) -> usize;
    fn eval(&self, eta: f64, tau: f64) -> f64;
    /// Interval of `η` outside which `G` vanishes.
    fn support(&self) -> (f64, f64);
}

/// Lift of a stationary mode to order `n`.
#[derive(Debug, Clone)]
pub struct LiftedStationary {
    pub mode: ModeConstants,
    pub phase_box: PhaseBox,
}

impl CharacteristicDensity for LiftedStationary {
    fn order(&self) -> usize {
        self.phase_box.order()
    }

    fn eval(&self, eta: f64, _tau: f64) -> f64 {
        let a = self.phase_box.width(0);
        if (0.0..=a).contains(&eta) {
            2.0 / self.phase_box.volume() * (self.mode.lambda * eta).sin().powi(2)
        } else {
            0.0
        }
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.phase_box.width(0))
    }
}

/// Lift of a theta solution to order `n`.
#[derive(Debug, Clone)]
pub struct LiftedTheta<'a> {
    pub solution: &'a ThetaSolution,
    pub phase_box: PhaseBox,
}

impl CharacteristicDensity for LiftedTheta<'_> {
    fn order(&self) -> usize {
        self.phase_box.order()
    }

    fn eval(&self, eta: f64, tau: f64) -> f64 {
        self.solution.density_or_zero(eta, tau) / self.phase_box.upper_volume()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.solution.params().a)
    }
}

fn check_point(p: &PhasePoint, bx: &PhaseBox) -> Result<()> {
    if p.dimension() != 1 {
        return Err(Error::InvalidDimension(p.dimension()));
    }
    bx.require_order(p.order())
}

/// `2 (Π_l Δa^(l))^{−1} sin²(λ_μ η_n(ξ, t))`, zero where `η_n ∉ [0, a]`.
pub fn f_n_stationary(p: &PhasePoint, t: f64, mode: &ModeConstants, bx: &PhaseBox) -> Result<f64> {
    check_point(p, bx)?;
    let lifted = LiftedStationary {
        mode: *mode,
        phase_box: bx.clone(),
    };
    Ok(lifted.eval(eta_1d(p.derivs(), t), 0.0))
}

/// `F^{μ,β}(η_n(ξ, t), τ_n(t)) / Π_{l≥1} Δa^(l)`, zero where `η_n ∉ [0, a]`.
pub fn f_n_theta(p: &PhasePoint, t: f64, sol: &ThetaSolution, bx: &PhaseBox) -> Result<f64> {
    check_point(p, bx)?;
    let lifted = LiftedTheta {
        solution: sol,
        phase_box: bx.clone(),
    };
    Ok(lifted.eval(eta_1d(p.derivs(), t), tau(p.order(), t)))
}
