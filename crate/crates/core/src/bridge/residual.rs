use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{unwrap_phase, CoefficientSet, WaveField};
use crate::characteristics::{factorial, tau};
use crate::{Error, Result};

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub grid: String,
    pub max_abs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    /// `pass` is `max_abs <= tolerance`; NaN never passes.
    pub fn new(
        name: impl Into<String>,
        grid: impl Into<String>,
        max_abs: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            grid: grid.into(),
            max_abs,
            tolerance,
            pass: max_abs <= tolerance,
        }
    }
}

/// Tensor grid of `(η, τ)` sample points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub eta: (f64, f64),
    pub n_eta: usize,
    pub tau: (f64, f64),
    pub n_tau: usize,
}

impl ResidualGrid {
    pub fn new(eta: (f64, f64), n_eta: usize, tau: (f64, f64), n_tau: usize) -> Result<Self> {
        if n_eta < 2 || n_tau < 2 || !(eta.0 < eta.1) || !(tau.0 < tau.1) {
            return Err(Error::InvalidArgument(
                "residual grid needs min < max and >= 2 points".into(),
            ));
        }
        Ok(Self {
            eta,
            n_eta,
            tau,
            n_tau,
        })
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let step =
            |(lo, hi): (f64, f64), n: usize, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        (0..self.n_tau).flat_map(move |it| {
            (0..self.n_eta).map(move |ie| {
                (
                    step(self.eta, self.n_eta, ie),
                    step(self.tau, self.n_tau, it),
                )
            })
        })
    }

    fn describe(&self, cfg: &ResidualConfig) -> String {
        format!(
            "eta [{:.4e}, {:.4e}] x {}, tau [{:.4e}, {:.4e}] x {}, delta {:.1e}",
            self.eta.0, self.eta.1, self.n_eta, self.tau.0, self.tau.1, self.n_tau, cfg.delta
        )
    }
}

/// Difference-step and tolerance settings shared by all residual checks.
///
/// Steps are `delta` divided by the field's characteristic wavenumber (space)
/// or frequency (time), so `delta` is dimensionless. Residuals are reported
/// relative to the largest magnitude of any single term on the grid and are
/// compared against `tol_constant · delta²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualConfig {
    pub delta: f64,
    pub tol_constant: f64,
    /// Points with `|Ψ|²` below this fraction of the grid maximum are skipped
    /// by the checks that divide by `|Ψ|`.
    pub node_floor: f64,
}

impl Default for ResidualConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            tol_constant: 1.0,
            node_floor: 1e-4,
        }
    }
}

impl ResidualConfig {
    pub fn tolerance(&self) -> f64 {
        self.tol_constant * self.delta * self.delta
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }
}

/// Running `(max residual, max term)` pair.
#[derive(Default)]
struct Normalizer {
    residual: f64,
    scale: f64,
}

impl Normalizer {
    fn push(&mut self, residual: f64, terms: &[f64]) {
        if residual.is_nan() {
            self.residual = f64::NAN;
        }
        self.residual = self.residual.max(residual);
        for t in terms {
            self.scale = self.scale.max(t.abs());
        }
    }

    fn value(&self) -> f64 {
        if self.residual.is_nan() {
            f64::NAN
        } else if self.scale == 0.0 {
            self.residual
        } else {
            self.residual / self.scale
        }
    }
}

fn steps(field: &dyn WaveField, cfg: &ResidualConfig) -> (f64, f64) {
    let s = field.scales();
    (cfg.delta / s.k, cfg.delta / s.omega)
}

/// `(i/β) ∂_τΨ − (α/β) ∂²_ηΨ`, which is `iħ∂_τΨ + (ħ²/2m)∂²_ηΨ` for the
/// canonical coefficients.
pub fn schrodinger_residual(
    name: &str,
    field: &dyn WaveField,
    coeffs: &CoefficientSet,
    grid: &ResidualGrid,
    cfg: &ResidualConfig,
) -> ResidualReport {
    let (h, ht) = steps(field, cfg);
    let i = Complex64::i();
    let mut norm = Normalizer::default();
    for (eta, tau) in grid.points() {
        let c = field.psi(eta, tau);
        let d_tau = (field.psi(eta, tau + ht) - field.psi(eta, tau - ht)) / (2.0 * ht);
        let d2 = (field.psi(eta + h, tau) - 2.0 * c + field.psi(eta - h, tau)) / (h * h);
        let time = i * d_tau / coeffs.betac;
        let space = d2 * (coeffs.alpha / coeffs.betac);
        norm.push((time - space).norm(), &[time.norm(), space.norm()]);
    }
    ResidualReport::new(name, grid.describe(cfg), norm.value(), cfg.tolerance())
}

/// `∂_τF + ∂_η J` with `J = F·⟨u⟩` the probability current.
pub fn vlasov1_residual(
    name: &str,
    density: &(dyn Fn(f64, f64) -> f64 + Sync),
    current: &(dyn Fn(f64, f64) -> f64 + Sync),
    scales: super::FieldScales,
    grid: &ResidualGrid,
    cfg: &ResidualConfig,
) -> ResidualReport {
    let (h, ht) = (cfg.delta / scales.k, cfg.delta / scales.omega);
    let mut norm = Normalizer::default();
    for (eta, tau) in grid.points() {
        let d_tau = (density(eta, tau + ht) - density(eta, tau - ht)) / (2.0 * ht);
        let d_eta = (current(eta + h, tau) - current(eta - h, tau)) / (2.0 * h);
        norm.push((d_tau + d_eta).abs(), &[d_tau, d_eta]);
    }
    ResidualReport::new(name, grid.describe(cfg), norm.value(), cfg.tolerance())
}

fn max_density(field: &dyn WaveField, grid: &ResidualGrid) -> f64 {
    grid.points()
        .map(|(e, t)| field.psi(e, t).norm_sqr())
        .fold(0.0, f64::max)
}

/// Phases of `Ψ` at consecutive samples, unwrapped.
fn phases(values: [Complex64; 3]) -> [f64; 3] {
    let un = unwrap_phase(&values.map(|v| v.arg()));
    [un[0], un[1], un[2]]
}

/// `−∂_τφ/β + ⟨u⟩²/(4αβ) − V` with `V = Q` inside the well (`U = 0`).
/// For the canonical coefficients this is `−ħ∂_τφ − m⟨u⟩²/2 − Q`.
pub fn hamilton_jacobi_residual(
    name: &str,
    field: &dyn WaveField,
    coeffs: &CoefficientSet,
    grid: &ResidualGrid,
    cfg: &ResidualConfig,
) -> ResidualReport {
    let (h, ht) = steps(field, cfg);
    let floor = cfg.node_floor * max_density(field, grid);
    let CoefficientSet { alpha, betac, .. } = *coeffs;
    let mut norm = Normalizer::default();
    for (eta, tau) in grid.points() {
        let line = [
            field.psi(eta - h, tau),
            field.psi(eta, tau),
            field.psi(eta + h, tau),
        ];
        let column = [field.psi(eta, tau - ht), line[1], field.psi(eta, tau + ht)];
        if line.iter().chain(&column).any(|p| p.norm_sqr() < floor) {
            continue;
        }
        let pt = phases(column);
        let pe = phases(line);
        let phi_tau = (pt[2] - pt[0]) / (2.0 * ht);
        let u = -2.0 * alpha * (pe[2] - pe[0]) / (2.0 * h);
        let r = line.map(|p| p.norm());
        let q = alpha / betac * (r[2] - 2.0 * r[1] + r[0]) / (h * h * r[1]);
        let terms = [-phi_tau / betac, u * u / (4.0 * alpha * betac), -q];
        norm.push(terms.iter().sum::<f64>().abs(), &terms);
    }
    ResidualReport::new(name, grid.describe(cfg), norm.value(), cfg.tolerance())
}

/// `∂_τ⟨u⟩ + ⟨u⟩∂_η⟨u⟩ + (1/m)∂_ηQ` with `1/m = −2αβ`. `⟨u⟩` and `Q` come
/// from the field's analytic jet; their derivatives by central differences.
pub fn motion_residual(
    name: &str,
    field: &dyn WaveField,
    coeffs: &CoefficientSet,
    grid: &ResidualGrid,
    cfg: &ResidualConfig,
) -> ResidualReport {
    use super::{flux_from_psi, quantum_potential, Derivatives};
    let (h, ht) = steps(field, cfg);
    let floor = cfg.node_floor * max_density(field, grid);
    let d = Derivatives::Analytic { fallback_h: h };
    let mut norm = Normalizer::default();
    for (eta, tau) in grid.points() {
        let stencil = [
            (eta - h, tau),
            (eta + h, tau),
            (eta, tau - ht),
            (eta, tau + ht),
            (eta, tau),
        ];
        if stencil
            .iter()
            .any(|&(e, t)| field.psi(e, t).norm_sqr() < floor)
        {
            continue;
        }
        let u = |e: f64, t: f64| flux_from_psi(field, coeffs, e, t, d).unwrap_or(f64::NAN);
        let q = |e: f64, t: f64| quantum_potential(field, coeffs, e, t, d).unwrap_or(f64::NAN);
        let u0 = u(eta, tau);
        let u_tau = (u(eta, tau + ht) - u(eta, tau - ht)) / (2.0 * ht);
        let u_eta = (u(eta + h, tau) - u(eta - h, tau)) / (2.0 * h);
        let q_eta = (q(eta + h, tau) - q(eta - h, tau)) / (2.0 * h);
        let terms = [u_tau, u0 * u_eta, coeffs.inverse_mass() * q_eta];
        norm.push(terms.iter().sum::<f64>().abs(), &terms);
    }
    ResidualReport::new(name, grid.describe(cfg), norm.value(), cfg.tolerance())
}

/// A phase-space sample for the chain residual with its difference steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSample {
    pub xi: Vec<f64>,
    pub t: f64,
    /// One step per coordinate `ξ_k`.
    pub steps: Vec<f64>,
    pub dt: f64,
}

/// Steps for the chain residual at `(ξ, t)`. `k` and `omega` are the
/// wavenumber and frequency of the underlying characteristic solution;
/// each coordinate gets `delta` over its own effective wavenumber
/// `k·|∂η_n/∂ξ_k|` (at least `k`), and time gets `delta` over the local
/// rate `k|∂_tη_n| + ω|τ_n'| + 1`.
pub fn chain_steps(xi: &[f64], t: f64, k: f64, omega: f64, delta: f64) -> ChainSample {
    let n = xi.len();
    let steps = (0..n)
        .map(|j| {
            let c = t.abs().powi(j as i32) / factorial(j);
            delta / (k * c.max(1.0))
        })
        .collect();
    // ∂_t η_n = Σ_{j>=1} (−1)^j t^{j−1}/(j−1)! ξ_j ; τ_n' = −τ_{n−1}
    let eta_rate: f64 = (1..n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * t.powi(j as i32 - 1) / factorial(j - 1) * xi[j]
        })
        .sum();
    let rate = k * eta_rate.abs() + omega * tau(n - 1, t).abs() + 1.0;
    ChainSample {
        xi: xi.to_vec(),
        t,
        steps,
        dt: delta / rate,
    }
}

/// Residual of the `n`-th chain equation in one dimension,
/// `∂_t f + Σ_{k<n−1} ξ_{k+1} ∂_{ξ_k} f + ∂_{ξ_{n−1}} g`, where `g` is `f`
/// times the mean of the next derivative. Supported for `n ∈ {2, 3}`.
pub fn vlasov_chain_residual(
    name: &str,
    f: &(dyn Fn(&[f64], f64) -> f64 + Sync),
    g: &(dyn Fn(&[f64], f64) -> f64 + Sync),
    samples: &[ChainSample],
    cfg: &ResidualConfig,
) -> Result<ResidualReport> {
    let n = samples.first().map_or(2, |s| s.xi.len());
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidOrder(n));
    }
    let mut norm = Normalizer::default();
    let mut work = vec![0.0; n];
    for s in samples {
        if s.xi.len() != n || s.steps.len() != n {
            return Err(Error::DerivativeCount {
                expected: n,
                got: s.xi.len(),
            });
        }
        let mut terms = Vec::with_capacity(n + 1);
        terms.push((f(&s.xi, s.t + s.dt) - f(&s.xi, s.t - s.dt)) / (2.0 * s.dt));
        let mut partial = |func: &dyn Fn(&[f64], f64) -> f64, k: usize| {
            work.copy_from_slice(&s.xi);
            work[k] = s.xi[k] + s.steps[k];
            let plus = func(&work, s.t);
            work[k] = s.xi[k] - s.steps[k];
            let minus = func(&work, s.t);
            (plus - minus) / (2.0 * s.steps[k])
        };
        for k in 0..n - 1 {
            terms.push(s.xi[k + 1] * partial(f, k));
        }
        terms.push(partial(g, n - 1));
        norm.push(terms.iter().sum::<f64>().abs(), &terms);
    }
    let grid = format!(
        "{} phase-space samples of order {n}, delta {:.1e}",
        samples.len(),
        cfg.delta
    );
    Ok(ResidualReport::new(
        name,
        grid,
        norm.value(),
        cfg.tolerance(),
    ))
}
