//! The aggregated verification suite.
//!
//! Every check returns a [`ResidualReport`]: a measured discrepancy and the
//! tolerance it is held to. Checks are independent of each other so callers
//! may run them in any order or in parallel.

use crate::bridge::{
    chain_steps, flux_from_potential_line, flux_from_psi, hamilton_jacobi_residual,
    motion_residual, quantum_potential, schrodinger_residual, vlasov1_residual,
    vlasov_chain_residual, CoefficientSet, Derivatives, ResidualConfig, ResidualGrid,
    ResidualReport, WaveField,
};
use crate::chain::{
    classify_region, marginal, marginal_density, marginalize_general, polygon_area,
    support_polygon, LiftedStationary, MarginalQuadrature, PhaseBox,
};
use crate::characteristics::{eta, eta_1d, propagate, tau, PhasePoint, TaylorPropagator};
use crate::quadrature::{periodic_mean, GaussLegendre};
use crate::well::{
    FluxParsing, ModeConstants, StationaryMode, ThetaSolution, TruncationPolicy, WellParams,
};
use crate::{Result, DENSITY_FLOOR};

/// Inputs shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub params: WellParams,
    pub mu: u32,
    pub beta: f64,
    pub adot: f64,
    pub truncation: TruncationPolicy,
    pub flux_parsing: FluxParsing,
    pub residual: ResidualConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            params: WellParams::default(),
            mu: 1,
            beta: 0.01,
            adot: 1.0,
            truncation: TruncationPolicy::default(),
            flux_parsing: FluxParsing::default(),
            residual: ResidualConfig::default(),
        }
    }
}

impl VerifyConfig {
    fn theta(&self) -> Result<ThetaSolution> {
        Ok(
            ThetaSolution::new(self.params, self.mu, self.beta, self.truncation)?
                .with_flux_parsing(self.flux_parsing),
        )
    }

    fn theta_at(&self, beta: f64) -> Result<ThetaSolution> {
        Ok(
            ThetaSolution::new(self.params, self.mu, beta, self.truncation)?
                .with_flux_parsing(self.flux_parsing),
        )
    }

    fn stationary(&self) -> Result<StationaryMode> {
        StationaryMode::new(self.params, self.mu)
    }

    fn phase_box(&self) -> Result<PhaseBox> {
        PhaseBox::two(self.params.a, self.adot)
    }

    fn interior_grid(&self, period: f64, n: usize) -> Result<ResidualGrid> {
        let a = self.params.a;
        ResidualGrid::new((0.02 * a, 0.98 * a), n, (0.0, period), n)
    }
}

/// A named verification check.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub run: fn(&VerifyConfig) -> Result<ResidualReport>,
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check").field("name", &self.name).finish()
    }
}

/// All checks, in report order.
pub fn checks() -> Vec<Check> {
    macro_rules! c {
        ($name:literal, $f:path) => {
            Check {
                name: $name,
                run: $f,
            }
        };
    }
    vec![
        c!("characteristic_conservation", characteristic_conservation),
        c!("taylor_group_property", taylor_group_property),
        c!("marginal_density_oracle", marginal_density_oracle),
        c!("marginal_flux_oracle", marginal_flux_oracle),
        c!("marginal_mass", marginal_mass),
        c!("branch_continuity", branch_continuity),
        c!("general_marginalizer", general_marginalizer),
        c!("parallelogram_area", parallelogram_area),
        c!("theta_dual_path", theta_dual_path),
        c!("theta_normalization", theta_normalization),
        c!("theta_periodicity", theta_periodicity),
        c!("time_average", time_average),
        c!("beta_limit_density", beta_limit_density),
        c!("beta_limit_flux", beta_limit_flux),
        c!("flux_dual_oracle", flux_dual_oracle),
        c!("phase_potential_consistency", phase_potential_consistency),
        c!("quantum_potential", quantum_potential_check),
        c!("schrodinger_stationary", schrodinger_stationary),
        c!("schrodinger_theta", schrodinger_theta),
        c!("continuity_theta", continuity_theta),
        c!("chain_n2_stationary", chain_n2_stationary),
        c!("chain_n3_stationary", chain_n3_stationary),
        c!("chain_n2_theta", chain_n2_theta),
        c!("hamilton_jacobi_stationary", hamilton_jacobi_stationary),
        c!("hamilton_jacobi_theta", hamilton_jacobi_theta),
        c!("motion_theta", motion_theta),
    ]
}

/// Runs every check sequentially.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<ResidualReport>> {
    checks().iter().map(|c| (c.run)(cfg)).collect()
}

/// Low-discrepancy point in `[0, 1)`: fractional part of `i·α` for an
/// irrational `α` chosen per coordinate.
pub fn weyl(i: usize, coord: usize) -> f64 {
    const ALPHAS: [f64; 6] = [
        0.618_033_988_749_894_8,
        0.414_213_562_373_095_1,
        0.732_050_807_568_877_2,
        0.236_067_977_499_789_7,
        0.645_751_311_064_590_6,
        0.316_624_790_355_399_9,
    ];
    ((i + 1) as f64 * ALPHAS[coord % ALPHAS.len()]).fract()
}

/// Largest drift of `η_n` along truncated Taylor trajectories, `n ∈ {2,3,4}`,
/// `t ∈ [0, 5]`, `samples` trajectories per order.
pub fn conservation_drift(samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for i in 0..samples {
            let derivs: Vec<f64> = (0..n).map(|k| 4.0 * weyl(i, k) - 2.0).collect();
            let p = PhasePoint::new_1d(&derivs)?;
            let t = 5.0 * weyl(i, 5);
            let start = eta(&p, 0.0)[0];
            let moved = propagate(&p, t);
            worst = worst.max((eta(&moved, t)[0] - start).abs());
        }
    }
    Ok(worst)
}

fn characteristic_conservation(_: &VerifyConfig) -> Result<ResidualReport> {
    Ok(ResidualReport::new(
        "characteristic_conservation",
        "n in {2,3,4}, 10000 trajectories each, t in [0, 5]",
        conservation_drift(10_000)?,
        1e-10,
    ))
}

fn taylor_group_property(_: &VerifyConfig) -> Result<ResidualReport> {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for i in 0..50 {
            let (t1, t2) = (4.0 * weyl(i, 0) - 2.0, 4.0 * weyl(i, 1) - 2.0);
            let ab = TaylorPropagator::new(n, t1).compose(&TaylorPropagator::new(n, t2));
            let direct = TaylorPropagator::new(n, t1 + t2);
            for (x, y) in ab.matrix().iter().zip(direct.matrix()) {
                worst = worst.max((x - y).abs() / y.abs().max(1.0));
            }
            worst = worst.max((direct.determinant() - 1.0).abs());
        }
    }
    Ok(ResidualReport::new(
        "taylor_group_property",
        "orders 1..6, 50 time pairs",
        worst,
        1e-12,
    ))
}

/// `(∫F dv, ∫vF dv)/ȧ` over the velocity window by a single Gauss–Legendre panel.
fn marginal_oracle(
    x: f64,
    t: f64,
    mode: &ModeConstants,
    bx: &PhaseBox,
    rule: &GaussLegendre,
) -> Result<(f64, f64)> {
    let Some((v1, v2)) = classify_region(x, t, bx)?.v_limits else {
        return Ok((0.0, 0.0));
    };
    let (a, adot) = (bx.width(0), bx.width(1));
    let f = |v: f64| 2.0 / (a * adot) * (mode.lambda * (x - v * t)).sin().powi(2);
    Ok((
        rule.integrate(v1, v2, f),
        rule.integrate(v1, v2, |v| v * f(v)),
    ))
}

/// Worst relative mismatch of the closed-form marginal density and mean
/// velocity against 64-node quadrature on an `n × n` grid with
/// `t ∈ (0, t_max]`, for each `μ` in `mus`.
pub fn marginal_oracle_errors(
    params: &WellParams,
    adot: f64,
    mus: &[u32],
    n: usize,
    t_max: f64,
) -> Result<(f64, f64)> {
    let bx = PhaseBox::two(params.a, adot)?;
    let rule = GaussLegendre::new(64);
    let (mut dens, mut flux): (f64, f64) = (0.0, 0.0);
    for &mu in mus {
        let mode = ModeConstants::new(params, mu)?;
        for it in 1..=n {
            let t = t_max * it as f64 / n as f64;
            for ix in 0..n {
                let x = (params.a + adot * t_max) * ix as f64 / (n - 1) as f64;
                let (d0, d1) = marginal_oracle(x, t, &mode, &bx, &rule)?;
                let r = marginal(x, t, &mode, &bx)?;
                dens = dens.max((r.density - d0).abs() / d0.abs().max(DENSITY_FLOOR));
                if let (Some(v), true) = (r.mean_flux, d0 >= DENSITY_FLOOR) {
                    let vo = d1 / d0;
                    flux = flux.max((v - vo).abs() / vo.abs().max(DENSITY_FLOOR));
                }
            }
        }
    }
    Ok((dens, flux))
}

fn marginal_density_oracle(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let t_max = 2.0 * cfg.params.a / cfg.adot;
    let (d, _) = marginal_oracle_errors(&cfg.params, cfg.adot, &[1, 3, 5], 60, t_max)?;
    Ok(ResidualReport::new(
        "marginal_density_oracle",
        "mu in {1,3,5}, 60 x 60 (x, t)",
        d,
        1e-8,
    ))
}

fn marginal_flux_oracle(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let t_max = 2.0 * cfg.params.a / cfg.adot;
    let (_, f) = marginal_oracle_errors(&cfg.params, cfg.adot, &[1, 3, 5], 60, t_max)?;
    Ok(ResidualReport::new(
        "marginal_flux_oracle",
        "mu in {1,3,5}, 60 x 60 (x, t)",
        f,
        1e-8,
    ))
}

fn marginal_mass(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let bx = cfg.phase_box()?;
    let mode = ModeConstants::new(&cfg.params, cfg.mu)?;
    let rule = GaussLegendre::new(32);
    let (a, adot) = (cfg.params.a, cfg.adot);
    let mut worst: f64 = 0.0;
    for it in 0..=10 {
        let t = 2.0 * a / adot * it as f64 / 10.0;
        let mut cuts = [0.0, a, adot * t, a + adot * t];
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            for p in 0..8 {
                let lo = w[0] + (w[1] - w[0]) * p as f64 / 8.0;
                let hi = w[0] + (w[1] - w[0]) * (p + 1) as f64 / 8.0;
                let mut acc = 0.0;
                for (node, weight) in rule.nodes().iter().zip(rule.weights()) {
                    let x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * node;
                    acc += weight * marginal_density(x, t, &mode, &bx)?;
                }
                total += 0.5 * (hi - lo) * acc;
            }
        }
        worst = worst.max((total - 1.0).abs());
    }
    Ok(ResidualReport::new(
        "marginal_mass",
        "11 times in [0, 2a/adot]",
        worst,
        1e-8,
    ))
}

/// Largest jump in marginal density or mean velocity across the branch
/// switch lines `x = a` and `x = ȧt`, sampled at `samples` times.
pub fn branch_jump(params: &WellParams, adot: f64, mu: u32, samples: usize) -> Result<f64> {
    let bx = PhaseBox::two(params.a, adot)?;
    let mode = ModeConstants::new(params, mu)?;
    let mut worst: f64 = 0.0;
    let eps = 1e-9;
    for i in 0..samples {
        let t = 0.02 + 2.0 * params.a / adot * weyl(i, 2);
        for xb in [params.a, adot * t] {
            let lo = marginal(xb - eps, t, &mode, &bx)?;
            let hi = marginal(xb + eps, t, &mode, &bx)?;
            worst = worst.max((lo.density - hi.density).abs());
            if let (Some(p), Some(q)) = (lo.mean_flux, hi.mean_flux) {
                worst = worst.max((p - q).abs());
            }
        }
    }
    Ok(worst)
}

fn branch_continuity(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let jump = branch_jump(&cfg.params, cfg.adot, cfg.mu.max(1), 500)?;
    Ok(ResidualReport::new(
        "branch_continuity",
        "1000 boundary points, offset 1e-9",
        jump,
        1e-6,
    ))
}

fn general_marginalizer(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let bx = cfg.phase_box()?;
    let mode = ModeConstants::new(&cfg.params, cfg.mu)?;
    let lifted = LiftedStationary {
        mode,
        phase_box: bx.clone(),
    };
    let quad = MarginalQuadrature::new(32, 8)?;
    let mut worst: f64 = 0.0;
    for it in 0..10 {
        let t = 2.0 * cfg.params.a / cfg.adot * it as f64 / 10.0;
        for ix in 0..30 {
            let x = (cfg.params.a + cfg.adot * t) * (ix as f64 + 0.5) / 30.0;
            let num = marginalize_general(&lifted, &PhasePoint::new_1d(&[x])?, t, &bx, &quad)?;
            worst = worst.max((num - marginal_density(x, t, &mode, &bx)?).abs());
        }
    }
    Ok(ResidualReport::new(
        "general_marginalizer",
        "10 x 30 (x, t), 32 nodes x 8 panels",
        worst,
        1e-8,
    ))
}

fn parallelogram_area(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let bx = cfg.phase_box()?;
    let area = cfg.params.a * cfg.adot;
    let worst = (0..20)
        .map(|i| (polygon_area(&support_polygon(0.3 * i as f64, &bx)) - area).abs())
        .fold(0.0, f64::max);
    Ok(ResidualReport::new(
        "parallelogram_area",
        "20 times in [0, 5.7]",
        worst,
        1e-12,
    ))
}

/// Largest `|F − |Ψ|²|` on an `n × n` grid covering `[0, a] × [0, T]`.
pub fn dual_path_error(sol: &ThetaSolution, n: usize) -> Result<f64> {
    let (a, period) = (sol.params().a, sol.mode().period);
    let mut worst: f64 = 0.0;
    for it in 0..n {
        let tau = period * it as f64 / (n - 1) as f64;
        for ix in 0..n {
            let eta = a * ix as f64 / (n - 1) as f64;
            let f = sol.density(eta, tau)?;
            worst = worst.max((f - sol.psi(eta, tau)?.norm_sqr()).abs());
        }
    }
    Ok(worst)
}

fn theta_dual_path(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let e = dual_path_error(&cfg.theta()?, 50)?;
    Ok(ResidualReport::new(
        "theta_dual_path",
        "50 x 50 (eta, tau) over one period",
        e,
        1e-10,
    ))
}

/// Largest `|∫₀^a F dη − 1|` over `samples` times in one period. The density
/// is a trigonometric polynomial periodic on `[0, a]`, so the trapezoid rule
/// with enough points is exact.
pub fn normalization_error(sol: &ThetaSolution, samples: usize) -> Result<f64> {
    let (a, period) = (sol.params().a, sol.mode().period);
    let n = 8 * (2 * sol.k_max() + 2) * sol.mode().mu as usize + 64;
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let tau = period * i as f64 / samples as f64;
        let mass = a * periodic_mean(0.0, a, n, |e| sol.density_unchecked(e, tau));
        worst = worst.max((mass - 1.0).abs());
    }
    Ok(worst)
}

fn theta_normalization(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let e = normalization_error(&cfg.theta()?, 20)?;
    Ok(ResidualReport::new(
        "theta_normalization",
        "20 tau samples, periodic trapezoid in eta",
        e,
        1e-10,
    ))
}

/// Largest change of density and of mean flux over one period shift. Flux
/// differences are relative to `max(|u|, 1)` and only taken where the
/// density is at least `rel_floor` of its grid maximum: the flux is a ratio
/// and loses accuracy near the nodes of the density.
pub fn periodicity_error(sol: &ThetaSolution, n: usize, rel_floor: f64) -> Result<(f64, f64)> {
    let (a, period) = (sol.params().a, sol.mode().period);
    let mut samples = Vec::new();
    let mut f_max: f64 = 0.0;
    let mut density_gap: f64 = 0.0;
    for it in 0..n {
        let tau = period * it as f64 / n as f64;
        for ix in 0..=n {
            let eta = a * ix as f64 / n as f64;
            let (f0, u0) = sol.density_and_flux(eta, tau)?;
            let (f1, u1) = sol.density_and_flux(eta, tau + period)?;
            density_gap = density_gap.max((f0 - f1).abs());
            f_max = f_max.max(f0);
            samples.push((f0, u0, u1));
        }
    }
    let mut flux_gap: f64 = 0.0;
    for (f0, u0, u1) in samples {
        if let (Some(u0), Some(u1), true) = (u0, u1, f0 >= rel_floor * f_max) {
            flux_gap = flux_gap.max((u0 - u1).abs() / u0.abs().max(1.0));
        }
    }
    Ok((density_gap, flux_gap))
}

/// Relative density floor for the flux part of the periodicity check.
pub const PERIODICITY_FLOOR: f64 = 1e-3;

fn theta_periodicity(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let (f, u) = periodicity_error(&cfg.theta()?, 40, PERIODICITY_FLOOR)?;
    Ok(ResidualReport::new(
        "theta_periodicity",
        "40 x 41 (eta, tau), shift by T; flux where density >= 1e-3 max",
        f.max(u),
        1e-10,
    ))
}

/// Largest mismatch between the closed-form period average and the periodic
/// trapezoid average of the density at `points` interior positions.
pub fn time_average_error(sol: &ThetaSolution, points: usize, n_tau: usize) -> Result<f64> {
    let (a, period) = (sol.params().a, sol.mode().period);
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let eta = a * (i as f64 + 0.5) / points as f64;
        let numeric = periodic_mean(0.0, period, n_tau, |t| sol.density_unchecked(eta, t));
        worst = worst.max((numeric - sol.density_time_avg(eta)?).abs());
    }
    Ok(worst)
}

fn time_average(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let e = time_average_error(&cfg.theta()?, 100, 1024)?;
    Ok(ResidualReport::new(
        "time_average",
        "100 eta points, 1024-point period trapezoid",
        e,
        1e-8,
    ))
}

/// Rounding allowance added to the analytic tail bounds.
pub const TAIL_ROUNDING: f64 = 1e-12;

/// `(sup |F^{μ,β} − F^μ|, bound)` on an interior grid over one period.
pub fn beta_limit_density_gap(sol: &ThetaSolution, n: usize) -> Result<(f64, f64)> {
    let stat = StationaryMode::new(*sol.params(), sol.mode().mu)?;
    let (a, period) = (sol.params().a, sol.mode().period);
    let mut worst: f64 = 0.0;
    for it in 0..n {
        let tau = period * it as f64 / n as f64;
        for ix in 0..=n {
            let eta = a * ix as f64 / n as f64;
            worst = worst.max((sol.density(eta, tau)? - stat.density_or_zero(eta)).abs());
        }
    }
    Ok((worst, sol.freeze_tail_bound() + TAIL_ROUNDING))
}

/// `(sup |⟨u⟩|, sup of the pointwise tail bound)` on interior points; fails
/// pointwise if any `|⟨u⟩|` exceeds its own bound, reported as `+∞`.
pub fn beta_limit_flux_gap(sol: &ThetaSolution, n: usize) -> Result<(f64, f64)> {
    let (a, period) = (sol.params().a, sol.mode().period);
    let (mut worst, mut bound): (f64, f64) = (0.0, 0.0);
    for it in 0..n {
        let tau = period * it as f64 / n as f64;
        for ix in 1..n {
            let eta = a * ix as f64 / n as f64;
            let (f, u) = sol.density_and_flux(eta, tau)?;
            let Some(u) = u else { continue };
            let b = sol.flux_tail_bound(f) + TAIL_ROUNDING;
            if u.abs() > b {
                return Ok((f64::INFINITY, b));
            }
            worst = worst.max(u.abs());
            bound = bound.max(b);
        }
    }
    Ok((worst, bound))
}

fn beta_limit_density(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let (gap, bound) = beta_limit_density_gap(&cfg.theta_at(10.0)?, 40)?;
    Ok(ResidualReport::new(
        "beta_limit_density",
        "beta = 10, 40 x 41 grid; tolerance = tail bound",
        gap,
        bound,
    ))
}

fn beta_limit_flux(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let (gap, bound) = beta_limit_flux_gap(&cfg.theta_at(10.0)?, 40)?;
    Ok(ResidualReport::new(
        "beta_limit_flux",
        "beta = 10, 40 x 39 interior grid; tolerance = tail bound",
        gap,
        bound,
    ))
}

/// Largest relative mismatch between the flux series and the phase-gradient
/// flux of `Ψ`, over points whose density is at least `rel_floor` of the
/// grid maximum.
pub fn flux_dual_error(sol: &ThetaSolution, n: usize, rel_floor: f64) -> Result<f64> {
    let coeffs = CoefficientSet::canonical(sol.params());
    let (a, period) = (sol.params().a, sol.mode().period);
    let mut samples = Vec::new();
    let mut f_max: f64 = 0.0;
    for it in 0..n {
        let tau = period * it as f64 / n as f64;
        for ix in 1..n {
            let eta = a * ix as f64 / n as f64;
            let (f, u) = sol.density_and_flux(eta, tau)?;
            f_max = f_max.max(f);
            samples.push((eta, tau, f, u));
        }
    }
    let mut worst: f64 = 0.0;
    for (eta, tau, f, u) in samples {
        if f < rel_floor * f_max {
            continue;
        }
        let d = Derivatives::Analytic { fallback_h: 1e-7 };
        let (Some(u), Some(v)) = (u, flux_from_psi(sol, &coeffs, eta, tau, d)) else {
            continue;
        };
        worst = worst.max((u - v).abs() / v.abs().max(1.0));
    }
    Ok(worst)
}

fn flux_dual_oracle(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let e = flux_dual_error(&cfg.theta()?, 50, 1e-6)?;
    Ok(ResidualReport::new(
        "flux_dual_oracle",
        "50 x 49 (eta, tau), density >= 1e-6 max",
        e,
        1e-8,
    ))
}

fn phase_potential_consistency(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let sol = cfg.theta()?;
    let coeffs = CoefficientSet::canonical(&cfg.params);
    let a = cfg.params.a;
    let k = sol.scales().k;
    let n = ((200.0 * k * a) as usize).clamp(2000, 200_000);
    let etas: Vec<f64> = (0..=n)
        .map(|i| 0.02 * a + 0.96 * a * i as f64 / n as f64)
        .collect();
    let step = etas[1] - etas[0];
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let tau = sol.mode().period * (0.1 + 0.17 * i as f64);
        let rho: Vec<f64> = etas
            .iter()
            .map(|&e| sol.psi_unchecked(e, tau).norm_sqr())
            .collect();
        let f_max = rho.iter().copied().fold(0.0, f64::max);
        let line = flux_from_potential_line(&sol, &coeffs, &etas, tau);
        for ((e, u), r) in etas.iter().zip(line).zip(&rho) {
            let Some(u) = u else { continue };
            if *r < 1e-2 * f_max {
                continue;
            }
            let d = Derivatives::Analytic { fallback_h: 1e-7 };
            if let Some(v) = flux_from_psi(&sol, &coeffs, *e, tau, d) {
                worst = worst.max((u - v).abs() / v.abs().max(1.0));
            }
        }
    }
    // central differences on the unwrapped potential: O((k·step)²)
    let tol = 10.0 * (k * step).powi(2);
    Ok(ResidualReport::new(
        "phase_potential_consistency",
        format!("5 tau lines, {} eta samples", n + 1),
        worst,
        tol,
    ))
}

/// Largest `|Q/E − 1|` for the stationary modes `μ ∈ mus` at `points`
/// off-node positions.
pub fn quantum_potential_error(params: &WellParams, mus: &[u32], points: usize) -> Result<f64> {
    let coeffs = CoefficientSet::canonical(params);
    let mut worst: f64 = 0.0;
    for &mu in mus {
        let s = StationaryMode::new(*params, mu)?;
        let mut used = 0;
        let mut i = 0;
        while used < points {
            let eta = params.a * weyl(i, 3);
            i += 1;
            // stay a little away from the nodes at multiples of a/μ
            let z = eta * mu as f64 / params.a;
            if (z - z.round()).abs() < 0.02 {
                continue;
            }
            let d = Derivatives::Analytic { fallback_h: 1e-6 };
            let q =
                quantum_potential(&s, &coeffs, eta, 0.37 * s.mode.period, d).unwrap_or(f64::NAN);
            worst = worst.max((q / s.mode.energy - 1.0).abs());
            used += 1;
        }
    }
    Ok(worst)
}

fn quantum_potential_check(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let e = quantum_potential_error(&cfg.params, &[1, 2, 3], 100)?;
    Ok(ResidualReport::new(
        "quantum_potential",
        "mu in {1,2,3}, 100 off-node points",
        e,
        1e-8,
    ))
}

fn schrodinger_stationary(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let s = cfg.stationary()?;
    let grid = cfg.interior_grid(s.mode.period, 40)?;
    let coeffs = CoefficientSet::canonical(&cfg.params);
    Ok(schrodinger_residual(
        "schrodinger_stationary",
        &s,
        &coeffs,
        &grid,
        &cfg.residual,
    ))
}

fn schrodinger_theta(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let sol = cfg.theta()?;
    let grid = cfg.interior_grid(sol.mode().period, 40)?;
    let coeffs = CoefficientSet::canonical(&cfg.params);
    Ok(schrodinger_residual(
        "schrodinger_theta",
        &sol,
        &coeffs,
        &grid,
        &cfg.residual,
    ))
}

fn continuity_theta(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let sol = cfg.theta()?;
    let grid = cfg.interior_grid(sol.mode().period, 40)?;
    let density = |e: f64, t: f64| sol.density_unchecked(e, t);
    let current = |e: f64, t: f64| sol.current(e, t);
    Ok(vlasov1_residual(
        "continuity_theta",
        &density,
        &current,
        sol.scales(),
        &grid,
        &cfg.residual,
    ))
}

/// Phase-space samples of order `n` whose `η_n` lies inside the well, at
/// `nt` times up to `t_max`.
pub fn chain_samples(
    n: usize,
    params: &WellParams,
    adot: f64,
    field: &dyn WaveField,
    delta: f64,
    t_max: f64,
    nt: usize,
) -> Vec<crate::bridge::ChainSample> {
    let sc = field.scales();
    let a = params.a;
    let mut out = Vec::new();
    for it in 1..=nt {
        let t = t_max * it as f64 / nt as f64;
        for ie in 0..12 {
            let target = a * (0.05 + 0.9 * (ie as f64 + 0.5) / 12.0);
            for iv in 0..4 {
                let mut xi = vec![0.0; n];
                xi[1] = adot * (0.1 + 0.25 * iv as f64);
                if n > 2 {
                    xi[2] = 0.3 * adot;
                }
                xi[0] = target - eta_1d(&xi, t);
                out.push(chain_steps(&xi, t, sc.k, sc.omega, delta));
            }
        }
    }
    out
}

fn chain_stationary(cfg: &VerifyConfig, n: usize, name: &str) -> Result<ResidualReport> {
    let s = cfg.stationary()?;
    let widths: Vec<f64> = std::iter::once(cfg.params.a)
        .chain(std::iter::repeat_n(cfg.adot, n - 1))
        .collect();
    let lifted = LiftedStationary {
        mode: s.mode,
        phase_box: PhaseBox::new(widths)?,
    };
    use crate::chain::CharacteristicDensity;
    let f = |xi: &[f64], t: f64| lifted.eval(eta_1d(xi, t), tau(n, t));
    let zero = |_: &[f64], _: f64| 0.0;
    let samples = chain_samples(
        n,
        &cfg.params,
        cfg.adot,
        &s,
        cfg.residual.delta,
        2.0 * cfg.params.a / cfg.adot,
        10,
    );
    vlasov_chain_residual(name, &f, &zero, &samples, &cfg.residual)
}

fn chain_n2_stationary(cfg: &VerifyConfig) -> Result<ResidualReport> {
    chain_stationary(cfg, 2, "chain_n2_stationary")
}

fn chain_n3_stationary(cfg: &VerifyConfig) -> Result<ResidualReport> {
    chain_stationary(cfg, 3, "chain_n3_stationary")
}

fn chain_n2_theta(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let sol = cfg.theta()?;
    let adot = cfg.adot;
    let f = |xi: &[f64], t: f64| sol.density_unchecked(eta_1d(xi, t), tau(2, t)) / adot;
    let g = |xi: &[f64], t: f64| sol.current(eta_1d(xi, t), tau(2, t)) / adot;
    // τ_2 = −t²/2 sweeps a little over one period
    let t_max = 1.2 * (2.0 * sol.mode().period).sqrt();
    let samples = chain_samples(2, &cfg.params, adot, &sol, cfg.residual.delta, t_max, 10);
    vlasov_chain_residual("chain_n2_theta", &f, &g, &samples, &cfg.residual)
}

fn hamilton_jacobi_stationary(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let s = cfg.stationary()?;
    let grid = cfg.interior_grid(s.mode.period, 40)?;
    let coeffs = CoefficientSet::canonical(&cfg.params);
    Ok(hamilton_jacobi_residual(
        "hamilton_jacobi_stationary",
        &s,
        &coeffs,
        &grid,
        &cfg.residual,
    ))
}

fn hamilton_jacobi_theta(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let sol = cfg.theta()?;
    let grid = cfg.interior_grid(sol.mode().period, 40)?;
    let coeffs = CoefficientSet::canonical(&cfg.params);
    Ok(hamilton_jacobi_residual(
        "hamilton_jacobi_theta",
        &sol,
        &coeffs,
        &grid,
        &cfg.residual,
    ))
}

fn motion_theta(cfg: &VerifyConfig) -> Result<ResidualReport> {
    let sol = cfg.theta()?;
    let grid = cfg.interior_grid(sol.mode().period, 40)?;
    let coeffs = CoefficientSet::canonical(&cfg.params);
    Ok(motion_residual(
        "motion_theta",
        &sol,
        &coeffs,
        &grid,
        &cfg.residual,
    ))
}
