//! Acceptance suite: one pass/fail line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use vlasov_char::bridge::{
    hamilton_jacobi_residual, schrodinger_residual, vlasov1_residual, vlasov_chain_residual,
    CoefficientSet, FieldScales, ResidualConfig, ResidualGrid, ResidualReport, WaveField,
};
use vlasov_char::chain::{polygon_area, CharacteristicDensity, LiftedStationary, PhaseBox};
use vlasov_char::characteristics::{eta_1d, tau};
use vlasov_char::verify::{
    beta_limit_density_gap, beta_limit_flux_gap, branch_jump, chain_samples, checks,
    conservation_drift, dual_path_error, marginal_oracle_errors, normalization_error,
    periodicity_error, quantum_potential_error, time_average_error, VerifyConfig,
    PERIODICITY_FLOOR,
};
use vlasov_char::well::{
    FluxParsing, PsiJet, StationaryMode, ThetaSolution, TruncationPolicy, WellParams,
};
use vlasov_char_cli::analysis::count_interior_maxima;

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn params() -> WellParams {
    WellParams::default()
}

fn reference_theta() -> ThetaSolution {
    ThetaSolution::new(params(), 1, 0.01, TruncationPolicy::default()).unwrap()
}

fn below(name: &str, value: f64, tol: f64) -> Outcome {
    let line = format!("{name} = {value:.3e} (tol {tol:.1e})");
    if value < tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(Result::is_ok);
    let text = parts
        .into_iter()
        .map(|p| p.unwrap_or_else(|e| format!("{e} <-- FAIL")))
        .collect::<Vec<_>>()
        .join("; ");
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn c1_conservation() -> Outcome {
    below(
        "max |eta(t) - eta(0)|",
        conservation_drift(10_000).map_err(|e| e.to_string())?,
        1e-10,
    )
}

fn c2_marginal_oracle() -> Outcome {
    let t_max = 2.0 * params().a;
    let (d, f) = marginal_oracle_errors(&params(), 1.0, &[1, 3, 5], 200, t_max)
        .map_err(|e| e.to_string())?;
    all(vec![
        below("density rel", d, 1e-8),
        below("mean velocity rel", f, 1e-8),
    ])
}

fn c3_branch_continuity() -> Outcome {
    let mut parts = Vec::new();
    for mu in [1, 3, 5] {
        let jump = branch_jump(&params(), 1.0, mu, 500).map_err(|e| e.to_string())?;
        parts.push(below(&format!("mu={mu} jump"), jump, 1e-6));
    }
    all(parts)
}

fn c4_dual_path() -> Outcome {
    below(
        "max |F - |psi|^2|",
        dual_path_error(&reference_theta(), 50).map_err(|e| e.to_string())?,
        1e-10,
    )
}

fn c5_normalization_periodicity() -> Outcome {
    let sol = reference_theta();
    let n = normalization_error(&sol, 20).map_err(|e| e.to_string())?;
    let (pf, pu) = periodicity_error(&sol, 40, PERIODICITY_FLOOR).map_err(|e| e.to_string())?;
    all(vec![
        below("mass", n, 1e-10),
        below("F period", pf, 1e-10),
        below("flux period", pu, 1e-10),
    ])
}

fn c6_beta_limits() -> Outcome {
    let sol = ThetaSolution::new(params(), 1, 10.0, TruncationPolicy::default()).unwrap();
    let (dg, db) = beta_limit_density_gap(&sol, 40).map_err(|e| e.to_string())?;
    let (fg, fb) = beta_limit_flux_gap(&sol, 40).map_err(|e| e.to_string())?;
    all(vec![
        below("sup |F - F_stat|", dg, db),
        below("sup |flux|", fg, fb),
        below("density bound", db, 1e-5),
        below("flux bound", fb, 1e-5),
    ])
}

/// `Ψ·(1 + 0.02η)`: solves nothing in the well.
struct Tilted<'a>(&'a dyn WaveField);

impl WaveField for Tilted<'_> {
    fn psi(&self, eta: f64, tau: f64) -> Complex64 {
        self.0.psi(eta, tau) * (1.0 + 0.02 * eta)
    }

    fn jet(&self, _: f64, _: f64) -> Option<PsiJet> {
        None
    }

    fn scales(&self) -> FieldScales {
        self.0.scales()
    }
}

fn expect(r: ResidualReport, pass: bool) -> Outcome {
    let line = format!("{} {:.2e}/{:.1e}", r.name, r.max_abs, r.tolerance);
    if r.pass == pass {
        Ok(line)
    } else {
        Err(line)
    }
}

fn c7_residuals() -> Outcome {
    let vc = VerifyConfig::default();
    let mut parts = Vec::new();
    let wanted = [
        "schrodinger_stationary",
        "schrodinger_theta",
        "continuity_theta",
        "chain_n2_stationary",
        "chain_n3_stationary",
        "chain_n2_theta",
        "hamilton_jacobi_stationary",
        "hamilton_jacobi_theta",
        "motion_theta",
    ];
    for c in checks().into_iter().filter(|c| wanted.contains(&c.name)) {
        parts.push(expect((c.run)(&vc).map_err(|e| e.to_string())?, true));
    }

    let cfg = ResidualConfig::default();
    let coeffs = CoefficientSet::canonical(&params());
    let sol = reference_theta();
    let stat = StationaryMode::new(params(), 1).unwrap();
    let grid = ResidualGrid::new((0.01, 0.49), 40, (0.0, sol.mode().period), 40).unwrap();
    parts.push(expect(
        schrodinger_residual(
            "neg: tilted schrodinger",
            &Tilted(&sol),
            &coeffs,
            &grid,
            &cfg,
        ),
        false,
    ));
    parts.push(expect(
        hamilton_jacobi_residual(
            "neg: tilted hamilton-jacobi",
            &Tilted(&sol),
            &coeffs,
            &grid,
            &cfg,
        ),
        false,
    ));

    let broken = reference_theta().with_flux_parsing(FluxParsing::FactorOutsideCosine);
    let density = |e: f64, t: f64| sol.density_unchecked(e, t);
    let current = |e: f64, t: f64| broken.current(e, t);
    parts.push(expect(
        vlasov1_residual(
            "neg: broken flux parsing",
            &density,
            &current,
            sol.scales(),
            &grid,
            &cfg,
        ),
        false,
    ));

    for n in [2, 3] {
        let widths: Vec<f64> = std::iter::once(params().a)
            .chain(std::iter::repeat_n(1.0, n - 1))
            .collect();
        let lifted = LiftedStationary {
            mode: stat.mode,
            phase_box: PhaseBox::new(widths).unwrap(),
        };
        let tilted =
            |xi: &[f64], t: f64| lifted.eval(eta_1d(xi, t), tau(n, t)) * (1.0 + 0.05 * xi[1] * t);
        let zero = |_: &[f64], _: f64| 0.0;
        let samples = chain_samples(n, &params(), 1.0, &stat, cfg.delta, 1.0, 10);
        let r = vlasov_chain_residual(
            &format!("neg: tilted chain n={n}"),
            &tilted,
            &zero,
            &samples,
            &cfg,
        )
        .map_err(|e| e.to_string())?;
        parts.push(expect(r, false));
    }
    all(parts)
}

fn c8_quantum_potential() -> Outcome {
    below(
        "max |Q/E - 1|",
        quantum_potential_error(&params(), &[1, 2, 3], 100).map_err(|e| e.to_string())?,
        1e-8,
    )
}

fn cli(args: &[&str]) -> Result<Vec<Vec<String>>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vlasov-char"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok(text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect())
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or(f64::NAN)
}

fn c9_figures() -> Outcome {
    let mut by_t: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in cli(&["density-1d"])? {
        by_t.entry(num(&r[1]).to_bits())
            .or_default()
            .push(num(&r[2]));
    }
    let counts: Vec<usize> = by_t
        .values()
        .map(|f| count_interior_maxima(f, 1e-9 * f.iter().cloned().fold(0.0, f64::max)))
        .collect();
    let peaks = if counts.first() == Some(&5) && counts.windows(2).all(|w| w[1] <= w[0]) {
        Ok(format!("maxima per time {counts:?}"))
    } else {
        Err(format!("maxima per time {counts:?}"))
    };

    let flux: Vec<f64> = cli(&["flux-1d"])?
        .iter()
        .filter(|r| !r[2].is_empty())
        .map(|r| num(&r[2]))
        .collect();
    let min_flux = flux.iter().cloned().fold(f64::INFINITY, f64::min);
    let flux_ok = if min_flux >= 0.0 && !flux.is_empty() {
        Ok(format!("min flux {min_flux:.3e} over {} cells", flux.len()))
    } else {
        Err(format!("min flux {min_flux:.3e}"))
    };

    let mut corners: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for r in cli(&["phase-snapshots"])?
        .iter()
        .filter(|r| r[0] == "corner")
    {
        corners
            .entry(num(&r[1]).to_bits())
            .or_default()
            .push((num(&r[2]), num(&r[3])));
    }
    let areas: Vec<f64> = corners.values().map(|c| polygon_area(c)).collect();
    let spread = areas
        .iter()
        .map(|a| (a - areas[0]).abs())
        .fold(0.0, f64::max);
    all(vec![
        peaks,
        flux_ok,
        below("polygon area spread", spread, 1e-12),
    ])
}

fn c10_time_average() -> Outcome {
    below(
        "max |avg - closed form|",
        time_average_error(&reference_theta(), 100, 1024).map_err(|e| e.to_string())?,
        1e-8,
    )
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            title: "characteristic conservation",
            limit: Some(Duration::from_secs(1)),
            run: c1_conservation,
        },
        Criterion {
            id: 2,
            title: "marginal oracle equivalence",
            limit: Some(Duration::from_secs(10)),
            run: c2_marginal_oracle,
        },
        Criterion {
            id: 3,
            title: "branch continuity",
            limit: None,
            run: c3_branch_continuity,
        },
        Criterion {
            id: 4,
            title: "dual-path theta density",
            limit: None,
            run: c4_dual_path,
        },
        Criterion {
            id: 5,
            title: "normalization and periodicity",
            limit: None,
            run: c5_normalization_periodicity,
        },
        Criterion {
            id: 6,
            title: "beta limits",
            limit: None,
            run: c6_beta_limits,
        },
        Criterion {
            id: 7,
            title: "PDE residuals",
            limit: Some(Duration::from_secs(30)),
            run: c7_residuals,
        },
        Criterion {
            id: 8,
            title: "quantum potential",
            limit: None,
            run: c8_quantum_potential,
        },
        Criterion {
            id: 9,
            title: "figure reproduction",
            limit: None,
            run: c9_figures,
        },
        Criterion {
            id: 10,
            title: "time-average identity",
            limit: None,
            run: c10_time_average,
        },
    ];
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let Some(limit) = c.limit {
            if elapsed > limit {
                outcome = Err(format!(
                    "{} (runtime {elapsed:.2?} over {limit:?})",
                    outcome.unwrap_or_else(|e| e)
                ));
            }
        }
        let (tag, text) = match outcome {
            Ok(t) => ("PASS", t),
            Err(t) => {
                failed += 1;
                ("FAIL", t)
            }
        };
        println!("[{tag}] C{:<2} {} ({elapsed:.2?}): {text}", c.id, c.title);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
