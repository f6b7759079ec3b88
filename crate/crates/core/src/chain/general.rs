use super::{CharacteristicDensity, PhaseBox};
use crate::characteristics::{eta_1d, tau, PhasePoint};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Composite Gauss–Legendre settings for numerical marginals.
#[derive(Debug, Clone)]
pub struct MarginalQuadrature {
    rule: GaussLegendre,
    panels: usize,
}

impl MarginalQuadrature {
    pub fn new(nodes: usize, panels: usize) -> Result<Self> {
        if nodes == 0 || panels == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one node and one panel".into(),
            ));
        }
        Ok(Self {
            rule: GaussLegendre::new(nodes),
            panels,
        })
    }
}

impl Default for MarginalQuadrature {
    fn default() -> Self {
        Self {
            rule: GaussLegendre::new(32),
            panels: 16,
        }
    }
}

/// Integrates the top coordinate out of an order-`n` characteristic density.
///
/// With `ξ_{n−1}` ranging over `[0, Δa^(n−1)]`, `η_n = η_{n−1} − τ_{n−1} ξ_{n−1}`,
/// so `f_{n−1} = (1/|τ_{n−1}|) ∫ G(η', τ_n) dη'` between `η_{n−1}` and
/// `η_{n−1} − τ_{n−1} Δa^(n−1)`, clipped to the support of `G`. When
/// `τ_{n−1} = 0` the interval collapses and the result is
/// `Δa^(n−1) G(η_{n−1}, τ_n)`.
pub fn marginalize_general(
    density: &dyn CharacteristicDensity,
    p_lower: &PhasePoint,
    t: f64,
    bx: &PhaseBox,
    quad: &MarginalQuadrature,
) -> Result<f64> {
    let n = density.order();
    if n < 2 {
        return Err(Error::InvalidOrder(n));
    }
    bx.require_order(n)?;
    if p_lower.dimension() != 1 {
        return Err(Error::InvalidDimension(p_lower.dimension()));
    }
    if p_lower.order() != n - 1 {
        return Err(Error::InvalidOrder(p_lower.order()));
    }
    let eta_low = eta_1d(p_lower.derivs(), t);
    let tau_low = tau(n - 1, t);
    let tau_top = tau(n, t);
    let width = bx.width(n - 1);
    if tau_low == 0.0 {
        return Ok(width * density.eval(eta_low, tau_top));
    }
    let end = eta_low - tau_low * width;
    let (s0, s1) = density.support();
    let lo = eta_low.min(end).max(s0);
    let hi = eta_low.max(end).min(s1);
    if hi <= lo {
        return Ok(0.0);
    }
    let integral = quad
        .rule
        .integrate_composite(lo, hi, quad.panels, |e| density.eval(e, tau_top));
    Ok(integral / tau_low.abs())
}

/// Marginal of a product density `G_x(η_x) G_y(η_y) G_z(η_z)` in three
/// dimensions: one 1-D pass per axis, multiplied together.
pub fn marginalize_separable(
    factors: [&dyn CharacteristicDensity; 3],
    p_lower: &PhasePoint,
    t: f64,
    boxes: [&PhaseBox; 3],
    quad: &MarginalQuadrature,
) -> Result<f64> {
    if p_lower.dimension() != 3 {
        return Err(Error::InvalidDimension(p_lower.dimension()));
    }
    let mut product = 1.0;
    for axis in 0..3 {
        let coords: Vec<f64> = (0..p_lower.order()).map(|k| p_lower.get(k, axis)).collect();
        let p = PhasePoint::new_1d(&coords)?;
        product *= marginalize_general(factors[axis], &p, t, boxes[axis], quad)?;
    }
    Ok(product)
}
