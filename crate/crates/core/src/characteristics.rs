//! Characteristic coordinates of the `n`-th chain equation.
//!
//! For a phase point `ξ = (r, ṙ, …, r^(n-1))` the characteristic coordinate is
//!
//! ```text
//! η_n(ξ, t) = −Σ_{k=0}^{n−1} τ_k(t) r^(k),     τ_k(t) = (−1)^{k+1} t^k / k!
//! ```
//!
//! and the reduced time parameter is `τ_n(t)`. Along every free trajectory
//! truncated at order `n` (`r^(n) ≡ 0`) the coordinate `η_n` is conserved.
//! Each spatial axis is handled independently.

use crate::{Error, Result};

/// Largest supported phase-space order. Beyond this `k!` loses integer
/// exactness in `f64` and the alternating sums cancel catastrophically.
pub const MAX_ORDER: usize = 20;

/// `k!` as a running product. Exact in `f64` for `k <= 22`.
pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// `τ_k(t) = (−1)^{k+1} t^k / k!`.
pub fn tau(k: usize, t: f64) -> f64 {
    let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
    sign * t.powi(k as i32) / factorial(k)
}

/// Weights `τ_0(t), …, τ_{n−1}(t)` in one pass.
fn tau_sequence(order: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(order);
    // running t^k / k!
    let mut mag = 1.0;
    for k in 0..order {
        if k > 0 {
            mag *= t / k as f64;
        }
        out.push(if k % 2 == 0 { -mag } else { mag });
    }
    out
}

/// A point of `n`-th order phase space.
///
/// `derivs` is laid out as `[k][axis]`: the first `dimension` entries are the
/// position, the next `dimension` the velocity, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    order: usize,
    dimension: usize,
    derivs: Vec<f64>,
}

impl PhasePoint {
    pub fn new(order: usize, dimension: usize, derivs: Vec<f64>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidOrder(order));
        }
        if dimension != 1 && dimension != 3 {
            return Err(Error::InvalidDimension(dimension));
        }
        if derivs.len() != order * dimension {
            return Err(Error::DerivativeCount {
                expected: order * dimension,
                got: derivs.len(),
            });
        }
        Ok(Self {
            order,
            dimension,
            derivs,
        })
    }

    /// One-dimensional point `(x, ẋ, ẍ, …)`.
    pub fn new_1d(derivs: &[f64]) -> Result<Self> {
        Self::new(derivs.len(), 1, derivs.to_vec())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    /// `r^(k)` along `axis`.
    pub fn get(&self, k: usize, axis: usize) -> f64 {
        self.derivs[k * self.dimension + axis]
    }

    /// The point with its highest-order coordinate removed.
    pub fn lower(&self) -> Result<Self> {
        if self.order < 2 {
            return Err(Error::InvalidOrder(self.order - 1));
        }
        let keep = (self.order - 1) * self.dimension;
        Self::new(self.order - 1, self.dimension, self.derivs[..keep].to_vec())
    }

    /// Appends a new highest-order coordinate (one value per axis).
    pub fn raise(&self, top: &[f64]) -> Result<Self> {
        if top.len() != self.dimension {
            return Err(Error::DerivativeCount {
                expected: self.dimension,
                got: top.len(),
            });
        }
        let mut derivs = self.derivs.clone();
        derivs.extend_from_slice(top);
        Self::new(self.order + 1, self.dimension, derivs)
    }
}

/// Hyperplane normal `(τ_0(t), …, τ_{n−1}(t))` at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct TauWeights {
    pub order: usize,
    pub weights: Vec<f64>,
    pub time: f64,
}

/// Normal of the characteristic hyperplanes `η_n = const` at time `t`.
///
/// The result does not depend on the level value, so all hyperplanes at the
/// same instant are parallel.
pub fn hyperplane_normal(order: usize, t: f64) -> Result<TauWeights> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidOrder(order));
    }
    Ok(TauWeights {
        order,
        weights: tau_sequence(order, t),
        time: t,
    })
}

/// Characteristic coordinate per axis.
pub fn eta(p: &PhasePoint, t: f64) -> Vec<f64> {
    let weights = tau_sequence(p.order, t);
    (0..p.dimension)
        .map(|axis| {
            -weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * p.get(k, axis))
                .sum::<f64>()
        })
        .collect()
}

/// Characteristic coordinate of a one-dimensional point.
pub fn eta_1d(derivs: &[f64], t: f64) -> f64 {
    let weights = tau_sequence(derivs.len(), t);
    -weights.iter().zip(derivs).map(|(w, r)| w * r).sum::<f64>()
}

/// Upper-triangular Taylor matrix `M_N(t)` with entries `t^{j−i}/(j−i)!`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorPropagator {
    size: usize,
    time: f64,
    matrix: Vec<f64>,
}

impl TaylorPropagator {
    pub fn new(size: usize, t: f64) -> Self {
        let mut coeff = vec![1.0; size.max(1)];
        for d in 1..size {
            coeff[d] = coeff[d - 1] * t / d as f64;
        }
        let mut matrix = vec![0.0; size * size];
        for i in 0..size {
            for j in i..size {
                matrix[i * size + j] = coeff[j - i];
            }
        }
        Self {
            size,
            time: t,
            matrix,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.size + j]
    }

    /// Row-major matrix entries.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Determinant as the product of the diagonal (the matrix is triangular).
    pub fn determinant(&self) -> f64 {
        (0..self.size).map(|i| self.entry(i, i)).product()
    }

    pub fn compose(&self, other: &TaylorPropagator) -> TaylorPropagator {
        assert_eq!(self.size, other.size, "propagator sizes differ");
        let n = self.size;
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                matrix[i * n + j] = (i..=j).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
            }
        }
        TaylorPropagator {
            size: n,
            time: self.time + other.time,
            matrix,
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(
            v.len(),
            self.size,
            "vector length differs from propagator size"
        );
        (0..self.size)
            .map(|i| (i..self.size).map(|j| self.entry(i, j) * v[j]).sum())
            .collect()
    }
}

/// Moves a phase point along its free trajectory truncated at the point's
/// order (derivatives of order `>= n` are taken as zero).
pub fn propagate(p: &PhasePoint, t: f64) -> PhasePoint {
    let m = TaylorPropagator::new(p.order, t);
    let mut derivs = vec![0.0; p.derivs.len()];
    for axis in 0..p.dimension {
        let column: Vec<f64> = (0..p.order).map(|k| p.get(k, axis)).collect();
        for (k, value) in m.apply(&column).into_iter().enumerate() {
            derivs[k * p.dimension + axis] = value;
        }
    }
    PhasePoint {
        order: p.order,
        dimension: p.dimension,
        derivs,
    }
}
