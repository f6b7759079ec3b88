//! The theta-function ("Dirac comb") solution family.
//!
//! ```text
//! θ₁(z, τ) = Σ_k exp(iπτ(2k+1)²/4 + iπ(2z+1)(2k+1)/2)
//! Ψ(η, τ)  = θ₁(μη/a, −τ/T_μ + iβ) / √N(β),   N(β) = a Σ_k exp(−πβ(2k+1)²/2)
//! ```
//!
//! This `θ₁` is the negative of the textbook `θ₁(πz | τ)`; it is kept as
//! written so that boundary signs and phases match the density and flux
//! series below. Sums run over odd `j = 2k+1` symmetric about zero so the
//! truncated series still vanishes at integer `z`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ModeConstants, WellParams};
use crate::{Error, Result, DENSITY_FLOOR};

/// Hard cap on the number of adaptive series terms per side.
const ADAPTIVE_K_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationMode {
    /// Keep `|2k+1| <= 2K+1`.
    Fixed(usize),
    /// Grow `K` until the kept terms fall below `term_tol`.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub mode: TruncationMode,
    /// Relative magnitude below which a term is dropped.
    pub term_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            mode: TruncationMode::Adaptive,
            term_tol: 1e-16,
        }
    }
}

impl TruncationPolicy {
    pub fn fixed(k: usize) -> Self {
        Self {
            mode: TruncationMode::Fixed(k),
            ..Self::default()
        }
    }

    pub fn adaptive(term_tol: f64) -> Self {
        Self {
            mode: TruncationMode::Adaptive,
            term_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.term_tol > 0.0 && self.term_tol < 1.0) {
            return Err(Error::InvalidTruncation("term_tol must lie in (0, 1)"));
        }
        if self.mode == TruncationMode::Fixed(0) {
            return Err(Error::InvalidTruncation("fixed K must be >= 1"));
        }
        Ok(())
    }
}

/// How the flux series pairs the `(k − s)` factor with the cosine.
///
/// Only [`FluxParsing::CosineOfProduct`] reproduces the probability current;
/// the other reading exists as a negative control for the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxParsing {
    /// `cos((k − s) ϑ_{s,k})`
    #[default]
    CosineOfProduct,
    /// `(k − s) cos(ϑ_{s,k})`
    FactorOutsideCosine,
}

/// Chebyshev polynomial of the first kind by the three-term recurrence.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if n == 0 {
        return t0;
    }
    for _ in 1..n {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

fn theta_term(z: Complex64, tau_c: Complex64, j: f64) -> Complex64 {
    let i = Complex64::i();
    (i * PI * tau_c * (j * j) / 4.0 + i * PI * (2.0 * z + 1.0) * j / 2.0).exp()
}

/// `ln |term_j|` for the series of [`theta1`].
fn log_term_magnitude(z: Complex64, tau_c: Complex64, j: f64) -> f64 {
    -PI * tau_c.im * j * j / 4.0 - PI * z.im * j
}

/// The theta series `Σ_k exp(iπτ(2k+1)²/4 + iπ(2z+1)(2k+1)/2)` truncated per
/// `trunc`.
pub fn theta1(z: Complex64, tau_c: Complex64, trunc: &TruncationPolicy) -> Result<Complex64> {
    trunc.validate()?;
    if !(tau_c.im > 0.0) {
        return Err(Error::NonPositiveImaginaryPart(tau_c.im));
    }
    let log_tol = trunc.term_tol.ln();
    // magnitude peaks at j* = -2 Im z / Im τ
    let j_peak = -2.0 * z.im / tau_c.im;
    let log_peak = log_term_magnitude(z, tau_c, j_peak);

    let mut sum = Complex64::new(0.0, 0.0);
    let cap = match trunc.mode {
        TruncationMode::Fixed(k) => k,
        TruncationMode::Adaptive => ADAPTIVE_K_CAP,
    };
    for k in 0..=cap {
        let j = (2 * k + 1) as f64;
        sum += theta_term(z, tau_c, j) + theta_term(z, tau_c, -j);
        let last = log_term_magnitude(z, tau_c, j).max(log_term_magnitude(z, tau_c, -j));
        let past_peak = j > j_peak.abs();
        let small = last - log_peak < log_tol;
        if trunc.mode == TruncationMode::Adaptive && past_peak && small {
            return Ok(sum);
        }
        if k == cap {
            if past_peak && small {
                return Ok(sum);
            }
            return Err(Error::NonConvergent {
                k_max: cap,
                last_ratio: (last - log_peak).exp(),
            });
        }
    }
    unreachable!("loop returns at k == cap")
}

/// `Ψ` and its analytic derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiJet {
    pub psi: Complex64,
    pub d_eta: Complex64,
    pub d2_eta: Complex64,
    pub d3_eta: Complex64,
    pub d_tau: Complex64,
}

/// One term of the series: index `k` and Gaussian weight `exp(−πβ(2k+1)²/4)`.
#[derive(Debug, Clone, Copy)]
struct Term {
    k: i64,
    weight: f64,
}

impl Term {
    fn j(&self) -> f64 {
        (2 * self.k + 1) as f64
    }
}

/// The `(μ, β)` theta solution with its truncation fixed at construction.
#[derive(Debug, Clone)]
pub struct ThetaSolution {
    params: WellParams,
    mode: ModeConstants,
    beta: f64,
    trunc: TruncationPolicy,
    parsing: FluxParsing,
    terms: Vec<Term>,
    norm: f64,
    k_max: usize,
}

impl ThetaSolution {
    pub fn new(params: WellParams, mu: u32, beta: f64, trunc: TruncationPolicy) -> Result<Self> {
        trunc.validate()?;
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::NonPositive {
                name: "beta",
                value: beta,
            });
        }
        let mode = ModeConstants::new(&params, mu)?;
        // weight ratio w_k / w_0 = exp(−πβ k(k+1))
        let k_max = match trunc.mode {
            TruncationMode::Fixed(k) => {
                let ratio = (-PI * beta * (k * (k + 1)) as f64).exp();
                if ratio > trunc.term_tol {
                    return Err(Error::NonConvergent {
                        k_max: k,
                        last_ratio: ratio,
                    });
                }
                k
            }
            TruncationMode::Adaptive => {
                let bound = -trunc.term_tol.ln() / (PI * beta);
                let mut k = 0usize;
                while ((k * (k + 1)) as f64) <= bound {
                    k += 1;
                    if k > ADAPTIVE_K_CAP {
                        return Err(Error::NonConvergent {
                            k_max: ADAPTIVE_K_CAP,
                            last_ratio: (-PI * beta * (k * (k + 1)) as f64).exp(),
                        });
                    }
                }
                k
            }
        };
        let k_max_i = k_max as i64;
        let terms: Vec<Term> = (-k_max_i - 1..=k_max_i)
            .map(|k| {
                let j = (2 * k + 1) as f64;
                Term {
                    k,
                    weight: (-PI * beta * j * j / 4.0).exp(),
                }
            })
            .collect();
        // N(β) = a Σ w_k², summed smallest first
        let mut sq: Vec<f64> = terms.iter().map(|t| t.weight * t.weight).collect();
        sq.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let norm = params.a * sq.iter().sum::<f64>();
        Ok(Self {
            params,
            mode,
            beta,
            trunc,
            parsing: FluxParsing::default(),
            terms,
            norm,
            k_max,
        })
    }

    /// Same solution with a different flux-series reading.
    pub fn with_flux_parsing(mut self, parsing: FluxParsing) -> Self {
        self.parsing = parsing;
        self
    }

    pub fn params(&self) -> &WellParams {
        &self.params
    }

    pub fn mode(&self) -> &ModeConstants {
        &self.mode
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn truncation(&self) -> &TruncationPolicy {
        &self.trunc
    }

    pub fn flux_parsing(&self) -> FluxParsing {
        self.parsing
    }

    /// Cached `N(β)`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Largest `k` kept; the sums cover `|2k+1| <= 2K+1`.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Largest wavenumber whose term weight is at least `rel` of the leading one.
    pub fn significant_wavenumber(&self, rel: f64) -> f64 {
        let w0 = self.terms.iter().map(|t| t.weight).fold(0.0, f64::max);
        let j = self
            .terms
            .iter()
            .filter(|t| t.weight >= rel * w0)
            .map(|t| t.j().abs())
            .fold(1.0, f64::max);
        PI * j * self.mode.mu as f64 / self.params.a
    }

    fn z(&self, eta: f64) -> f64 {
        self.mode.mu as f64 * eta / self.params.a
    }

    /// Real part of the theta argument, `−μ²·2πħτ/(ma²) = −τ/T_μ`.
    fn tau_real(&self, tau: f64) -> f64 {
        -(self.mode.mu as f64) * self.mode.mu as f64 * 2.0 * PI * self.params.hbar * tau
            / (self.params.m * self.params.a * self.params.a)
    }

    fn phase(&self, z: f64, alpha: f64, j: f64) -> f64 {
        PI * alpha * j * j / 4.0 + PI * (2.0 * z + 1.0) * j / 2.0
    }

    /// `Ψ^{μ,β}(η, τ)`.
    pub fn psi(&self, eta: f64, tau: f64) -> Result<Complex64> {
        self.params.check_inside(eta)?;
        Ok(self.psi_unchecked(eta, tau))
    }

    pub(crate) fn psi_unchecked(&self, eta: f64, tau: f64) -> Complex64 {
        let z = self.z(eta);
        let alpha = self.tau_real(tau);
        let sum: Complex64 = self
            .terms
            .iter()
            .map(|t| Complex64::from_polar(t.weight, self.phase(z, alpha, t.j())))
            .sum();
        sum / self.norm.sqrt()
    }

    /// `Ψ` through the `ε_μ` parameterisation and the generic [`theta1`].
    pub fn psi_eps_form(&self, eta: f64, tau: f64) -> Result<Complex64> {
        self.params.check_inside(eta)?;
        let WellParams { m, hbar, .. } = self.params;
        let eps = self.mode.eps;
        let z = (2.0 * m * eps).sqrt() / hbar * eta;
        let tau_c = Complex64::new(-4.0 * PI * eps / hbar * tau, self.beta);
        Ok(theta1(Complex64::new(z, 0.0), tau_c, &self.trunc)? / self.norm.sqrt())
    }

    /// `Ψ` with analytic `η` derivatives up to third order and the `τ` derivative.
    pub fn psi_jet(&self, eta: f64, tau: f64) -> PsiJet {
        let z = self.z(eta);
        let alpha = self.tau_real(tau);
        let kscale = PI * self.mode.mu as f64 / self.params.a;
        let i = Complex64::i();
        let mut jet = PsiJet {
            psi: Complex64::new(0.0, 0.0),
            d_eta: Complex64::new(0.0, 0.0),
            d2_eta: Complex64::new(0.0, 0.0),
            d3_eta: Complex64::new(0.0, 0.0),
            d_tau: Complex64::new(0.0, 0.0),
        };
        for t in &self.terms {
            let j = t.j();
            let term = Complex64::from_polar(t.weight, self.phase(z, alpha, j));
            let q = kscale * j;
            jet.psi += term;
            jet.d_eta += i * q * term;
            jet.d2_eta -= q * q * term;
            jet.d3_eta -= i * q * q * q * term;
            jet.d_tau -= i * PI * j * j / (4.0 * self.mode.period) * term;
        }
        let s = 1.0 / self.norm.sqrt();
        PsiJet {
            psi: jet.psi * s,
            d_eta: jet.d_eta * s,
            d2_eta: jet.d2_eta * s,
            d3_eta: jet.d3_eta * s,
            d_tau: jet.d_tau * s,
        }
    }

    /// `ϑ_{s,k}(η, τ) = π(2μη/a + 1) − πτ(s+k+1)/T_μ`.
    pub fn vartheta_phase(&self, eta: f64, tau: f64, s: i64, k: i64) -> f64 {
        PI * (2.0 * self.z(eta) + 1.0) - PI * tau * (s + k + 1) as f64 / self.mode.period
    }

    /// Series pairs `(s, k)` with `s <= k` and their normalised weight
    /// `w_s w_k / N`, keeping those at least `rel` of the largest.
    pub fn significant_pairs(&self, rel: f64) -> Vec<(i64, i64, f64)> {
        let w0 = self.terms.iter().map(|t| t.weight).fold(0.0, f64::max);
        let cutoff = rel * w0 * w0;
        let mut out = Vec::new();
        for (i, ts) in self.terms.iter().enumerate() {
            for tk in &self.terms[i..] {
                let w = ts.weight * tk.weight;
                if w >= cutoff {
                    out.push((ts.k, tk.k, w / self.norm));
                }
            }
        }
        out
    }

    /// Slope `tan θ = (s+k+1)/(2μ)` of the line in `(τ/T, η/a)` along which
    /// the `(s, k)` summand is constant.
    pub fn characteristic_slope(&self, s: i64, k: i64) -> f64 {
        (s + k + 1) as f64 / (2.0 * self.mode.mu as f64)
    }

    /// Double series `(Σ W cos((k−s)ϑ), Σ W (s+k+1) c_{s,k})` where `c` follows
    /// the configured flux parsing. Pairs whose weight is below `term_tol`
    /// of the leading pair are skipped.
    fn double_series(&self, eta: f64, tau: f64, want_current: bool) -> (f64, f64) {
        let w_lead = self.terms.iter().map(|t| t.weight).fold(0.0, f64::max);
        let cutoff = self.trunc.term_tol * w_lead * w_lead;
        let a_ph = PI * (2.0 * self.z(eta) + 1.0);
        let b_ph = PI * tau / self.mode.period;
        let n = self.terms.len();
        let s0 = self.terms[0].k;
        let mut density = 0.0;
        let mut current = 0.0;
        // Pairs with k = s + d. Since ϑ_{s,s+d} = A − (2s+d+1)B, the angle
        // d·ϑ drops by 2dB each time s grows by one.
        for d in 0..n {
            let df = d as f64;
            let mut rotor =
                Complex64::from_polar(1.0, df * (a_ph - (2 * s0 + d as i64 + 1) as f64 * b_ph));
            let step = Complex64::from_polar(1.0, -2.0 * df * b_ph);
            let mult = if d == 0 { 1.0 } else { 2.0 };
            for i in 0..n - d {
                let (ts, tk) = (&self.terms[i], &self.terms[i + d]);
                let w = tk.weight * ts.weight;
                if w >= cutoff {
                    let cos_prod = rotor.re;
                    density += mult * w * cos_prod;
                    if want_current {
                        let (k, s) = (tk.k, ts.k);
                        let c = match self.parsing {
                            FluxParsing::CosineOfProduct => mult * cos_prod,
                            // antisymmetric in (s, k): the mirrored pair cancels
                            FluxParsing::FactorOutsideCosine => {
                                let theta = self.vartheta_phase(eta, tau, s, k);
                                df * theta.cos() + (-df) * theta.cos()
                            }
                        };
                        current += w * (s + k + 1) as f64 * c;
                    }
                }
                rotor *= step;
            }
        }
        (density / self.norm, current)
    }

    /// Density `F^{μ,β}(η, τ)` from the double cosine series.
    pub fn density(&self, eta: f64, tau: f64) -> Result<f64> {
        self.params.check_inside(eta)?;
        Ok(self.double_series(eta, tau, false).0)
    }

    /// Same as [`density`](Self::density) but zero outside the well.
    pub fn density_or_zero(&self, eta: f64, tau: f64) -> f64 {
        if (0.0..=self.params.a).contains(&eta) {
            self.double_series(eta, tau, false).0
        } else {
            0.0
        }
    }

    /// Prefactor `a / (2μ T_μ N(β))` of the flux series (before dividing by F).
    fn flux_prefactor(&self) -> f64 {
        self.params.a / (2.0 * self.mode.mu as f64 * self.mode.period * self.norm)
    }

    /// Density and mean flux; the flux is `None` where the density is below
    /// [`DENSITY_FLOOR`].
    pub fn density_and_flux(&self, eta: f64, tau: f64) -> Result<(f64, Option<f64>)> {
        self.params.check_inside(eta)?;
        let (f, current) = self.double_series(eta, tau, true);
        let flux = (f >= DENSITY_FLOOR).then(|| self.flux_prefactor() * current / f);
        Ok((f, flux))
    }

    /// Mean flux `⟨u^{(n−1)}⟩^{μ,β}(η, τ)`.
    pub fn flux(&self, eta: f64, tau: f64) -> Result<Option<f64>> {
        Ok(self.density_and_flux(eta, tau)?.1)
    }

    /// Probability current `F·⟨u⟩`, defined everywhere including nodes.
    /// Evaluated without the well check so stencils may straddle a wall.
    pub fn current(&self, eta: f64, tau: f64) -> f64 {
        self.flux_prefactor() * self.double_series(eta, tau, true).1
    }

    /// Density without the well check (the series extends periodically).
    pub fn density_unchecked(&self, eta: f64, tau: f64) -> f64 {
        self.double_series(eta, tau, false).0
    }

    /// Period average `(2/N) Σ exp(−πβ(2k+1)²/2) sin²((2k+1)πμη/a)`.
    pub fn density_time_avg(&self, eta: f64) -> Result<f64> {
        self.params.check_inside(eta)?;
        let z = self.z(eta);
        let sum: f64 = self
            .terms
            .iter()
            .filter(|t| t.k >= 0)
            .map(|t| t.weight * t.weight * (t.j() * PI * z).sin().powi(2))
            .sum();
        // k and −k−1 contribute equally
        Ok(2.0 * 2.0 * sum / self.norm)
    }

    /// Upper bound on `sup_η |F^{μ,β} − F^μ|` from the neglected terms of the
    /// series (everything outside `k, s ∈ {0, −1}`) and the shift in `N(β)`.
    pub fn freeze_tail_bound(&self) -> f64 {
        let w0 = (-PI * self.beta / 4.0).exp();
        let total: f64 = self.terms.iter().map(|t| t.weight).sum();
        let lead_norm = 2.0 * self.params.a * w0 * w0;
        let block = 4.0 * w0 * w0;
        block * (1.0 / self.norm - 1.0 / lead_norm).abs() + (total * total - block) / self.norm
    }

    /// Upper bound on `|⟨u⟩^{μ,β}(η, τ)|` at a point of density `density`.
    /// The leading 2×2 block of the current series cancels exactly.
    pub fn flux_tail_bound(&self, density: f64) -> f64 {
        let mut tail = 0.0;
        for tk in &self.terms {
            for ts in &self.terms {
                let lead = (tk.k == 0 || tk.k == -1) && (ts.k == 0 || ts.k == -1);
                if !lead {
                    tail += tk.weight * ts.weight * ((ts.k + tk.k + 1) as f64).abs();
                }
            }
        }
        self.flux_prefactor() * tail / density
    }
}

/// Numerical comparison of candidate symmetries of the flux over the second
/// half period. Each entry is a sup-norm mismatch on the sampled grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPeriodReport {
    /// `u(η, τ + T/2)` vs `−u(η, τ)`.
    pub shift_pointwise: f64,
    /// `u(η, τ + T/2)` vs `−u(a − η, τ)`.
    pub shift_reflected: f64,
    /// `u(η, T − τ)` vs `−u(η, τ)`.
    pub mirror_pointwise: f64,
    /// Largest `|u|` seen, for scale.
    pub flux_scale: f64,
}

/// Samples `nx × nt` interior points of the first half period and measures
/// each candidate reading of the "flux reverses in the second half" claim.
/// Points where any of the involved densities is below `rel_floor` of the
/// grid maximum are skipped.
pub fn half_period_flux_report(
    sol: &ThetaSolution,
    nx: usize,
    nt: usize,
    rel_floor: f64,
) -> Result<HalfPeriodReport> {
    let a = sol.params.a;
    let period = sol.mode.period;
    let mut samples = Vec::new();
    let mut f_max: f64 = 0.0;
    for it in 1..nt {
        let tau = 0.5 * period * it as f64 / nt as f64;
        for ix in 1..nx {
            let eta = a * ix as f64 / nx as f64;
            let base = sol.density_and_flux(eta, tau)?;
            let shift = sol.density_and_flux(eta, tau + 0.5 * period)?;
            let refl = sol.density_and_flux(a - eta, tau)?;
            let mirror = sol.density_and_flux(eta, period - tau)?;
            f_max = f_max.max(base.0);
            samples.push((base, shift, refl, mirror));
        }
    }
    let mut report = HalfPeriodReport {
        shift_pointwise: 0.0,
        shift_reflected: 0.0,
        mirror_pointwise: 0.0,
        flux_scale: 0.0,
    };
    let floor = rel_floor * f_max;
    for (base, shift, refl, mirror) in samples {
        if [base.0, shift.0, refl.0, mirror.0]
            .iter()
            .any(|&f| f < floor)
        {
            continue;
        }
        let (Some(u), Some(us), Some(ur), Some(um)) = (base.1, shift.1, refl.1, mirror.1) else {
            continue;
        };
        report.flux_scale = report.flux_scale.max(u.abs());
        report.shift_pointwise = report.shift_pointwise.max((us + u).abs());
        report.shift_reflected = report.shift_reflected.max((us + ur).abs());
        report.mirror_pointwise = report.mirror_pointwise.max((um + u).abs());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::periodic_mean;
    use crate::well::density_stationary;

    fn reference_comb() -> ThetaSolution {
        ThetaSolution::new(WellParams::default(), 1, 0.01, TruncationPolicy::default()).unwrap()
    }

    #[test]
    fn theta1_vanishes_at_integers() {
        let trunc = TruncationPolicy::default();
        for tau_c in [
            Complex64::new(0.3, 0.05),
            Complex64::new(-1.2, 1.0),
            Complex64::new(0.0, 0.01),
        ] {
            let scale = theta1(Complex64::new(0.5, 0.0), tau_c, &trunc)
                .unwrap()
                .norm()
                .max(1.0);
            for z in [0.0, 1.0, -2.0, 3.0] {
                let v = theta1(Complex64::new(z, 0.0), tau_c, &trunc).unwrap();
                assert!(v.norm() < 1e-13 * scale, "z={z} tau={tau_c}: {v}");
            }
        }
    }

    #[test]
    fn theta1_truncation_self_consistency() {
        let z = Complex64::new(0.3, 0.0);
        let tau_c = Complex64::new(-0.5, 0.01);
        let a = theta1(z, tau_c, &TruncationPolicy::fixed(50)).unwrap();
        let b = theta1(z, tau_c, &TruncationPolicy::fixed(100)).unwrap();
        assert!((a - b).norm() <= 1e-12 * b.norm(), "{a} vs {b}");
        let c = theta1(z, tau_c, &TruncationPolicy::default()).unwrap();
        assert!((c - b).norm() <= 1e-12 * b.norm());
    }

    #[test]
    fn theta1_matches_textbook_with_sign_flip() {
        // standard θ₁(πz|τ) = 2 Σ_{n>=0} (−1)^n q^{(n+1/2)²} sin((2n+1)πz), q = e^{iπτ}
        let z = 0.37;
        let tau_c = Complex64::new(0.21, 0.4);
        let i = Complex64::i();
        let standard: Complex64 = (0..40)
            .map(|n| {
                let e = (n as f64 + 0.5).powi(2);
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                2.0 * sign * (i * PI * tau_c * e).exp() * ((2 * n + 1) as f64 * PI * z).sin()
            })
            .sum();
        let ours = theta1(Complex64::new(z, 0.0), tau_c, &TruncationPolicy::default()).unwrap();
        assert!((ours + standard).norm() < 1e-13, "{ours} vs {standard}");
    }

    #[test]
    fn theta1_errors() {
        let trunc = TruncationPolicy::default();
        assert!(matches!(
            theta1(Complex64::new(0.1, 0.0), Complex64::new(0.5, 0.0), &trunc),
            Err(Error::NonPositiveImaginaryPart(_))
        ));
        assert!(matches!(
            theta1(
                Complex64::new(0.1, 0.0),
                Complex64::new(0.5, 1e-4),
                &TruncationPolicy::fixed(3)
            ),
            Err(Error::NonConvergent { k_max: 3, .. })
        ));
        let bad = TruncationPolicy {
            mode: TruncationMode::Adaptive,
            term_tol: 1.5,
        };
        assert!(theta1(Complex64::new(0.1, 0.0), Complex64::new(0.5, 1.0), &bad).is_err());
    }

    #[test]
    fn theta1_handles_complex_argument() {
        let trunc = TruncationPolicy::default();
        let z = Complex64::new(0.2, 0.7);
        let tau_c = Complex64::new(0.1, 0.3);
        let a = theta1(z, tau_c, &trunc).unwrap();
        let b = theta1(z, tau_c, &TruncationPolicy::fixed(200)).unwrap();
        assert!((a - b).norm() <= 1e-12 * b.norm());
    }

    #[test]
    fn adaptive_k_is_desk_scale() {
        let s = reference_comb();
        assert!(s.k_max() > 20 && s.k_max() < 100, "K = {}", s.k_max());
        let big = ThetaSolution::new(WellParams::default(), 1, 10.0, TruncationPolicy::default())
            .unwrap();
        assert!(big.k_max() <= 2);
    }

    #[test]
    fn construction_errors() {
        let p = WellParams::default();
        assert!(ThetaSolution::new(p, 1, 0.0, TruncationPolicy::default()).is_err());
        assert!(ThetaSolution::new(p, 0, 1.0, TruncationPolicy::default()).is_err());
        assert!(matches!(
            ThetaSolution::new(p, 1, 0.01, TruncationPolicy::fixed(5)),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn boundary_values() {
        for mu in [1, 2, 3] {
            let s = ThetaSolution::new(WellParams::default(), mu, 0.1, TruncationPolicy::default())
                .unwrap();
            for tau in [0.0, 0.013, 0.1] {
                let peak = s.psi(0.25 / mu as f64, tau).unwrap().norm().max(1.0);
                assert!(s.psi(0.0, tau).unwrap().norm() < 1e-13 * peak);
                assert!(s.psi(0.5, tau).unwrap().norm() < 1e-12 * peak);
            }
        }
    }

    #[test]
    fn both_parameterisations_agree() {
        for (mu, beta) in [(1, 0.01), (2, 0.1), (3, 1.0)] {
            let s = ThetaSolution::new(
                WellParams::new(1.3, 0.8, 0.5).unwrap(),
                mu,
                beta,
                TruncationPolicy::default(),
            )
            .unwrap();
            let t = s.mode().period;
            for i in 0..15 {
                for j in 0..7 {
                    let eta = 0.5 * i as f64 / 14.0;
                    let tau = t * j as f64 / 5.3;
                    let a = s.psi(eta, tau).unwrap();
                    let b = s.psi_eps_form(eta, tau).unwrap();
                    let scale = a.norm().max(1.0);
                    assert!((a - b).norm() <= 1e-12 * scale, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn chebyshev_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let th: f64 = rng.gen_range(-10.0..10.0);
            for j in 0..=8 {
                assert!((chebyshev_t(j, th.cos()) - (j as f64 * th).cos()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn density_matches_modulus_squared() {
        let s = reference_comb();
        let t = s.mode().period;
        for i in 0..=20 {
            for j in 0..=20 {
                let eta = 0.5 * i as f64 / 20.0;
                let tau = t * j as f64 / 20.0;
                let f = s.density(eta, tau).unwrap();
                let p = s.psi(eta, tau).unwrap().norm_sqr();
                assert!((f - p).abs() < 1e-10, "({eta}, {tau}): {f} vs {p}");
            }
        }
    }

    #[test]
    fn vartheta_examples() {
        let s = reference_comb();
        assert!((s.vartheta_phase(0.0, 0.0, 3, 5) - PI).abs() < 1e-15);
        let a = s.vartheta_phase(0.1, 0.0, 2, -3);
        let b = s.vartheta_phase(0.1, 7.5, 2, -3);
        assert_eq!(a, b);
        // along η/a = slope·τ/T + c the phase is constant
        let (sidx, kidx) = (1, 2);
        let slope = s.characteristic_slope(sidx, kidx);
        let t = s.mode().period;
        let c = 0.1;
        let ref_phase = s.vartheta_phase(c * 0.5, 0.0, sidx, kidx);
        for step in 1..5 {
            let tau = t * step as f64 * 0.1;
            let eta = 0.5 * (slope * tau / t + c);
            assert!((s.vartheta_phase(eta, tau, sidx, kidx) - ref_phase).abs() < 1e-12);
        }
    }

    #[test]
    fn significant_pairs_cover_the_double_sum() {
        let s =
            ThetaSolution::new(WellParams::default(), 1, 0.5, TruncationPolicy::default()).unwrap();
        let n = 2 * s.k_max() + 2;
        let all = s.significant_pairs(0.0);
        assert_eq!(all.len(), n * (n + 1) / 2);
        // Σ_{s,k} w_s w_k / N, counting off-diagonal pairs twice
        let total: f64 = all
            .iter()
            .map(|&(i, j, w)| if i == j { w } else { 2.0 * w })
            .sum();
        let sum_w: f64 = (-(s.k_max() as i64) - 1..=s.k_max() as i64)
            .map(|k| (-PI * 0.5 * ((2 * k + 1) as f64).powi(2) / 4.0).exp())
            .sum();
        assert!((total - sum_w * sum_w / s.norm()).abs() < 1e-12 * total);
        let lead = s.significant_pairs(1.0);
        assert!(lead
            .iter()
            .all(|&(i, j, _)| [-1, 0].contains(&i) && [-1, 0].contains(&j)));
        assert_eq!(lead.len(), 3);
    }

    #[test]
    fn second_half_period_is_the_time_mirror() {
        // The reversal over the second half period is u(η, T − τ) = −u(η, τ);
        // neither half-period shift reading holds.
        for (mu, beta) in [(1, 0.01), (2, 0.05)] {
            let s =
                ThetaSolution::new(WellParams::default(), mu, beta, TruncationPolicy::default())
                    .unwrap();
            let r = half_period_flux_report(&s, 60, 40, 1e-3).unwrap();
            assert!(r.mirror_pointwise < 1e-10 * r.flux_scale, "{r:?}");
            assert!(r.shift_pointwise > 0.1 * r.flux_scale, "{r:?}");
            assert!(r.shift_reflected > 0.1 * r.flux_scale, "{r:?}");
        }
    }

    #[test]
    fn norm_matches_definition() {
        let s = reference_comb();
        let direct: f64 = (-200i64..200)
            .map(|k| (-PI * 0.01 * ((2 * k + 1) as f64).powi(2) / 2.0).exp())
            .sum::<f64>()
            * 0.5;
        assert!((s.norm() - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn time_average_matches_period_mean() {
        let s =
            ThetaSolution::new(WellParams::default(), 2, 0.2, TruncationPolicy::default()).unwrap();
        let t = s.mode().period;
        for i in 0..=10 {
            let eta = 0.5 * i as f64 / 10.0;
            let avg = s.density_time_avg(eta).unwrap();
            let mean = periodic_mean(0.0, t, 256, |tau| s.psi(eta, tau).unwrap().norm_sqr());
            assert!((avg - mean).abs() < 1e-10, "{avg} vs {mean}");
        }
        assert_eq!(s.density_time_avg(0.0).unwrap(), 0.0);
    }

    #[test]
    fn frozen_limit() {
        let s = ThetaSolution::new(WellParams::default(), 1, 10.0, TruncationPolicy::default())
            .unwrap();
        let bound = s.freeze_tail_bound();
        assert!(bound < 1e-20, "{bound}");
        for i in 0..=50 {
            let eta = 0.5 * i as f64 / 50.0;
            let stat = density_stationary(eta, s.mode(), s.params()).unwrap();
            for tau in [0.0, 0.3 * s.mode().period] {
                let f = s.density(eta, tau).unwrap();
                assert!((f - stat).abs() < 1e-12);
            }
            let avg = s.density_time_avg(eta).unwrap();
            assert!((avg - stat).abs() < 1e-12);
        }
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let s =
            ThetaSolution::new(WellParams::default(), 1, 0.3, TruncationPolicy::default()).unwrap();
        let (eta, tau) = (0.17, 0.011);
        let jet = s.psi_jet(eta, tau);
        let h = 1e-5;
        let fd = (s.psi(eta + h, tau).unwrap() - s.psi(eta - h, tau).unwrap()) / (2.0 * h);
        assert!((fd - jet.d_eta).norm() < 1e-6 * jet.d_eta.norm());
        let ht = 1e-7;
        let fdt = (s.psi(eta, tau + ht).unwrap() - s.psi(eta, tau - ht).unwrap()) / (2.0 * ht);
        assert!((fdt - jet.d_tau).norm() < 1e-6 * jet.d_tau.norm());
        assert!((jet.psi - s.psi(eta, tau).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn broken_parsing_kills_flux() {
        let s = ThetaSolution::new(WellParams::default(), 1, 0.1, TruncationPolicy::default())
            .unwrap()
            .with_flux_parsing(FluxParsing::FactorOutsideCosine);
        let u = s.flux(0.3, 0.2 * s.mode().period).unwrap().unwrap();
        assert!(u.abs() < 1e-12);
        let good =
            ThetaSolution::new(WellParams::default(), 1, 0.1, TruncationPolicy::default()).unwrap();
        assert!(
            good.flux(0.3, 0.2 * good.mode().period)
                .unwrap()
                .unwrap()
                .abs()
                > 1e-3
        );
    }

    proptest::proptest! {
        #[test]
        fn density_is_modulus_squared_and_periodic(
            mu in 1u32..4,
            beta in 0.02f64..1.0,
            eta_frac in 0.0f64..=1.0,
            tau_frac in 0.0f64..1.0,
        ) {
            let s = ThetaSolution::new(WellParams::default(), mu, beta, TruncationPolicy::default()).unwrap();
            let (eta, tau) = (0.5 * eta_frac, s.mode().period * tau_frac);
            let f = s.density(eta, tau).unwrap();
            let scale = 1.0 / (s.params().a * beta.sqrt());
            proptest::prop_assert!(f >= -1e-12 * scale);
            proptest::prop_assert!((f - s.psi(eta, tau).unwrap().norm_sqr()).abs() < 1e-10 * scale);
            let g = s.density(eta, tau + s.mode().period).unwrap();
            proptest::prop_assert!((f - g).abs() < 1e-10 * scale);
        }
    }
}
