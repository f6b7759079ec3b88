use super::{classify_region, BranchTag, PhaseBox};
use crate::well::ModeConstants;
use crate::{Result, DENSITY_FLOOR};

/// Density and mean velocity of the `n = 2` stationary lift at `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalResult {
    pub density: f64,
    /// `None` where the density is below the floor or outside the support.
    pub mean_flux: Option<f64>,
    pub branch: BranchTag,
}

/// `1 − sin(y)/y` without cancellation near zero.
fn one_minus_sinc(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        y2 * (1.0 / 6.0
            - y2 * (1.0 / 120.0 - y2 * (1.0 / 5040.0 - y2 * (1.0 / 362880.0 - y2 / 39916800.0))))
    } else {
        1.0 - y.sin() / y
    }
}

/// `(sin y − y cos y) / y³`.
fn g(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        1.0 / 3.0 - y2 * (1.0 / 30.0 - y2 * (1.0 / 840.0 - y2 * (1.0 / 45360.0 - y2 / 3991680.0)))
    } else {
        (y.sin() - y * y.cos()) / (y * y * y)
    }
}

/// Writes the velocity window as centre `vc` and half-width `h`, so that
/// `F(x − vt)` is `1 − cos(2λc − k u)` with `c = x − vc·t`, `k = 2λt`,
/// `u ∈ [−h, h]`. Both moments then have closed forms that stay finite as
/// `t → 0`.
fn moments(
    x: f64,
    t: f64,
    v1: f64,
    v2: f64,
    mode: &ModeConstants,
    a: f64,
    adot: f64,
) -> (f64, Option<f64>) {
    let h = 0.5 * (v2 - v1);
    let vc = 0.5 * (v1 + v2);
    let c = x - vc * t;
    let k = 2.0 * mode.lambda * t;
    let y = k * h;
    let phase = 2.0 * mode.lambda * c;
    // 1 − cos(phase)·sinc(y), split into two well-conditioned pieces
    let bracket = 2.0 * (0.5 * phase).sin().powi(2) + phase.cos() * one_minus_sinc(y);
    let density = 2.0 * h / (a * adot) * bracket;
    let flux = if density < DENSITY_FLOOR {
        None
    } else {
        Some(vc - phase.sin() * k * h * h * g(y) / bracket)
    };
    (density, flux)
}

/// Density `f_1` and mean velocity `⟨v⟩` of the lifted stationary mode,
/// integrated over `v ∈ [0, ȧ]`.
pub fn marginal(x: f64, t: f64, mode: &ModeConstants, bx: &PhaseBox) -> Result<MarginalResult> {
    bx.require_order(2)?;
    let branch = classify_region(x, t, bx)?;
    let Some((v1, v2)) = branch.v_limits else {
        return Ok(MarginalResult {
            density: 0.0,
            mean_flux: None,
            branch: branch.tag,
        });
    };
    let (density, mean_flux) = moments(x, t, v1, v2, mode, bx.width(0), bx.width(1));
    Ok(MarginalResult {
        density,
        mean_flux,
        branch: branch.tag,
    })
}

pub fn marginal_density(x: f64, t: f64, mode: &ModeConstants, bx: &PhaseBox) -> Result<f64> {
    Ok(marginal(x, t, mode, bx)?.density)
}

pub fn marginal_flux(x: f64, t: f64, mode: &ModeConstants, bx: &PhaseBox) -> Result<Option<f64>> {
    Ok(marginal(x, t, mode, bx)?.mean_flux)
}

/// Density in the form written with `v̄_j = x − v_j t`. Singular at `t = 0`;
/// kept as a cross-check of the stable evaluation.
pub fn marginal_density_direct(x: f64, t: f64, mode: &ModeConstants, bx: &PhaseBox) -> Result<f64> {
    bx.require_order(2)?;
    let Some((v1, v2)) = classify_region(x, t, bx)?.v_limits else {
        return Ok(0.0);
    };
    let (a, adot, lam) = (bx.width(0), bx.width(1), mode.lambda);
    let (b1, b2) = (x - v1 * t, x - v2 * t);
    Ok((b1 - b2 - (lam * (b2 + b1)).cos() * (lam * (b1 - b2)).sin() / lam) / (adot * a * t))
}

/// Mean velocity in the `v̄_j` form. Singular at `t = 0`.
pub fn marginal_flux_direct(
    x: f64,
    t: f64,
    mode: &ModeConstants,
    bx: &PhaseBox,
) -> Result<Option<f64>> {
    bx.require_order(2)?;
    let Some((v1, v2)) = classify_region(x, t, bx)?.v_limits else {
        return Ok(None);
    };
    let f1 = marginal_density_direct(x, t, mode, bx)?;
    if f1 < DENSITY_FLOOR {
        return Ok(None);
    }
    let (a, adot, lam) = (bx.width(0), bx.width(1), mode.lambda);
    let (b1, b2) = (x - v1 * t, x - v2 * t);
    let d = a * adot * t * t * f1;
    Ok(Some(
        x / t + (b2 * b2 - b1 * b1) / (2.0 * d)
            - (b2 * (2.0 * lam * b2).sin() - b1 * (2.0 * lam * b1).sin()) / (2.0 * lam * d)
            + (lam * (b2 + b1)).sin() * (lam * (b2 - b1)).sin() / (2.0 * lam * lam * d),
    ))
}
