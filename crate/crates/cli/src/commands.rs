use std::fs;
use std::path::Path;

use rayon::prelude::*;
use rayon::ThreadPool;
use vlasov_char::bridge::ResidualReport;
use vlasov_char::chain::{f_n_theta, marginal_density, marginal_flux, support_polygon, PhaseBox};
use vlasov_char::characteristics::PhasePoint;
use vlasov_char::verify::checks;
use vlasov_char::well::{ModeConstants, ThetaSolution};

use crate::config::RunConfig;
use crate::error::{CliError, Result, EXIT_OK, EXIT_VERIFY_FAILED};
use crate::grid::{linspace, GridSpec};
use crate::output::{emit, Cell, Table};

/// Environment variable capping the worker pool; `0` or unset means one
/// worker per core.
pub const THREADS_ENV: &str = "VLASOV_CHAR_THREADS";

/// Fractions of the period at which flux profiles are written.
pub const PROFILE_FRACTIONS: [f64; 5] = [1.0 / 8.0, 1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.5, 1.0 / 2.2];

/// Pairs weaker than this fraction of the leading pair are left out of the
/// characteristic-line overlay.
pub const OVERLAY_REL_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Density1d,
    Flux1d,
    ThetaMaps,
    PhaseSnapshots,
    Verify,
}

pub fn thread_count(value: Option<&str>) -> Result<usize> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => v.parse().map_err(|_| {
            CliError::Config(format!(
                "{THREADS_ENV} must be a non-negative integer, got `{v}`"
            ))
        }),
    }
}

pub fn pool_from_env() -> Result<ThreadPool> {
    let n = thread_count(std::env::var(THREADS_ENV).ok().as_deref())?;
    Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?)
}

/// Runs `command` and writes its output; returns the process exit code.
pub fn execute(command: Command, cfg: &RunConfig, pool: &ThreadPool) -> Result<i32> {
    let out = cfg.out.as_deref();
    match command {
        Command::Density1d => emit(out, &density_1d(cfg, pool)?.render(cfg.format)?)?,
        Command::Flux1d => emit(out, &flux_1d(cfg, pool)?.render(cfg.format)?)?,
        Command::PhaseSnapshots => emit(out, &phase_snapshots(cfg, pool)?.render(cfg.format)?)?,
        Command::ThetaMaps => {
            let dir =
                out.ok_or_else(|| CliError::Config("theta-maps needs --out <directory>".into()))?;
            write_theta_maps(dir, cfg, pool)?;
        }
        Command::Verify => {
            let reports = verify(cfg, pool)?;
            emit(out, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
            let failed: Vec<&str> = reports
                .iter()
                .filter(|r| !r.pass)
                .map(|r| r.name.as_str())
                .collect();
            eprintln!(
                "{}/{} checks passed",
                reports.len() - failed.len(),
                reports.len()
            );
            if !failed.is_empty() {
                eprintln!("failed: {}", failed.join(", "));
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

fn phase_box(cfg: &RunConfig) -> Result<PhaseBox> {
    Ok(PhaseBox::two(cfg.params.a, cfg.adot)?)
}

/// `(x, t)` grid for the marginal commands: by default 9 times in `[0, 2a/ȧ]` and
/// `x` over the whole support `[0, a + ȧ t_max]`.
pub fn marginal_grid(cfg: &RunConfig) -> Result<GridSpec> {
    let (a, adot) = (cfg.params.a, cfg.adot);
    let t_max = cfg.t_max.unwrap_or(2.0 * a / adot);
    GridSpec::new(
        (
            cfg.x_min.unwrap_or(0.0),
            cfg.x_max.unwrap_or(a + adot * t_max),
        ),
        cfg.nx.unwrap_or(201),
        (cfg.t_min.unwrap_or(0.0), t_max),
        cfg.nt.unwrap_or(9),
    )
}

/// Long table over `grid`, x-major so that `t` increases within each x block.
fn marginal_table(
    cfg: &RunConfig,
    pool: &ThreadPool,
    column: &str,
    eval: impl Fn(f64, f64) -> vlasov_char::Result<Cell> + Sync,
) -> Result<Table> {
    let grid = marginal_grid(cfg)?;
    let ts = grid.ts();
    let blocks: Vec<Vec<Vec<Cell>>> = pool.install(|| {
        grid.xs()
            .par_iter()
            .map(|&x| {
                ts.iter()
                    .map(|&t| Ok(vec![x.into(), t.into(), eval(x, t)?]))
                    .collect()
            })
            .collect::<vlasov_char::Result<_>>()
    })?;
    let mut table = Table::new(&["x", "t", column]);
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

/// Marginal coordinate density `f_1^μ(x, t)` (default `μ = 5`).
pub fn density_1d(cfg: &RunConfig, pool: &ThreadPool) -> Result<Table> {
    let mode = ModeConstants::new(&cfg.params, cfg.mu_or(5))?;
    let bx = phase_box(cfg)?;
    marginal_table(cfg, pool, "density", |x, t| {
        Ok(marginal_density(x, t, &mode, &bx)?.into())
    })
}

/// Mean velocity `⟨v⟩^μ(x, t)`; empty where the density vanishes.
pub fn flux_1d(cfg: &RunConfig, pool: &ThreadPool) -> Result<Table> {
    let mode = ModeConstants::new(&cfg.params, cfg.mu_or(5))?;
    let bx = phase_box(cfg)?;
    marginal_table(cfg, pool, "mean_velocity", |x, t| {
        Ok(marginal_flux(x, t, &mode, &bx)?.into())
    })
}

pub fn theta_solution(cfg: &RunConfig) -> Result<ThetaSolution> {
    Ok(
        ThetaSolution::new(cfg.params, cfg.mu_or(1), cfg.beta, cfg.truncation)?
            .with_flux_parsing(cfg.flux_parsing),
    )
}

/// `(η, τ)` grid for the theta maps: by default the well times one period.
pub fn theta_grid(cfg: &RunConfig, sol: &ThetaSolution) -> Result<GridSpec> {
    GridSpec::new(
        (cfg.x_min.unwrap_or(0.0), cfg.x_max.unwrap_or(cfg.params.a)),
        cfg.nx.unwrap_or(201),
        (
            cfg.t_min.unwrap_or(0.0),
            cfg.t_max.unwrap_or(sol.mode().period),
        ),
        cfg.nt.unwrap_or(201),
    )
}

/// The three theta tables: density map, flux profiles and the
/// characteristic-line overlay, keyed by file stem.
pub fn theta_maps(cfg: &RunConfig, pool: &ThreadPool) -> Result<Vec<(&'static str, Table)>> {
    let sol = theta_solution(cfg)?;
    let grid = theta_grid(cfg, &sol)?;
    let (etas, taus) = (grid.xs(), grid.ts());

    let blocks: Vec<Vec<Vec<Cell>>> = pool.install(|| {
        etas.par_iter()
            .map(|&e| {
                taus.iter()
                    .map(|&t| vec![e.into(), t.into(), sol.density_or_zero(e, t).into()])
                    .collect()
            })
            .collect()
    });
    let mut density = Table::new(&["eta", "tau", "density"]);
    blocks.into_iter().flatten().for_each(|r| density.push(r));

    let period = sol.mode().period;
    let blocks: Vec<Vec<Vec<Cell>>> = pool.install(|| {
        PROFILE_FRACTIONS
            .par_iter()
            .map(|&frac| {
                let tau = period * frac;
                etas.iter()
                    .map(|&e| {
                        let u = if (0.0..=cfg.params.a).contains(&e) {
                            sol.flux(e, tau)?
                        } else {
                            None
                        };
                        Ok(vec![tau.into(), e.into(), u.into()])
                    })
                    .collect()
            })
            .collect::<vlasov_char::Result<_>>()
    })?;
    let mut profiles = Table::new(&["tau", "eta", "flux"]);
    blocks.into_iter().flatten().for_each(|r| profiles.push(r));

    let mut overlay = Table::new(&["s", "k", "harmonic", "slope", "weight"]);
    for (s, k, w) in sol.significant_pairs(OVERLAY_REL_WEIGHT) {
        if s < k {
            overlay.push(vec![
                (s as f64).into(),
                (k as f64).into(),
                ((k - s) as f64).into(),
                sol.characteristic_slope(s, k).into(),
                w.into(),
            ]);
        }
    }
    Ok(vec![
        ("theta_density", density),
        ("theta_flux_profiles", profiles),
        ("theta_characteristics", overlay),
    ])
}

fn write_theta_maps(dir: &Path, cfg: &RunConfig, pool: &ThreadPool) -> Result<()> {
    let tables = theta_maps(cfg, pool)?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for (stem, table) in tables {
        let path = dir.join(format!("{stem}.{}", cfg.format.extension()));
        emit(Some(&path), &table.render(cfg.format)?)?;
    }
    Ok(())
}

/// Snapshot times: from the config, else `{0, a/2ȧ, a/ȧ, 2a/ȧ}`.
pub fn snapshot_times(cfg: &RunConfig) -> Vec<f64> {
    let s = cfg.params.a / cfg.adot;
    cfg.times
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.5 * s, s, 2.0 * s])
}

/// `f_2^{μ,β}(x, v, t)` on the bounding box of the support at each snapshot
/// time (`kind = sample`), the support corners (`corner`, no `f`) and points
/// on three `η` level segments (`level`).
pub fn phase_snapshots(cfg: &RunConfig, pool: &ThreadPool) -> Result<Table> {
    let sol = theta_solution(cfg)?;
    let bx = phase_box(cfg)?;
    let (a, adot) = (cfg.params.a, cfg.adot);
    let nx = cfg.nx.unwrap_or(101);
    let nv = cfg.nv.unwrap_or(nx);
    GridSpec::new((0.0, 1.0), nx, (0.0, 1.0), nv)?;
    let f = |x: f64, v: f64, t: f64| -> vlasov_char::Result<f64> {
        f_n_theta(&PhasePoint::new_1d(&[x, v])?, t, &sol, &bx)
    };
    let mut table = Table::new(&["kind", "t", "x", "v", "f"]);
    for t in snapshot_times(cfg) {
        let xs = linspace(0.0, a + adot * t, nx);
        let vs = linspace(0.0, adot, nv);
        let rows: Vec<Vec<Vec<Cell>>> = pool.install(|| {
            xs.par_iter()
                .map(|&x| {
                    vs.iter()
                        .map(|&v| {
                            Ok(vec![
                                "sample".into(),
                                t.into(),
                                x.into(),
                                v.into(),
                                f(x, v, t)?.into(),
                            ])
                        })
                        .collect()
                })
                .collect::<vlasov_char::Result<_>>()
        })?;
        rows.into_iter().flatten().for_each(|r| table.push(r));
        for (x, v) in support_polygon(t, &bx) {
            table.push(vec![
                "corner".into(),
                t.into(),
                x.into(),
                v.into(),
                Cell::Missing,
            ]);
        }
        for eta in [0.25 * a, 0.5 * a, 0.75 * a] {
            for v in linspace(0.0, adot, 9) {
                let x = eta + v * t;
                table.push(vec![
                    "level".into(),
                    t.into(),
                    x.into(),
                    v.into(),
                    f(x, v, t)?.into(),
                ]);
            }
        }
    }
    Ok(table)
}

/// Every verification check, evaluated on the pool, in suite order.
pub fn verify(cfg: &RunConfig, pool: &ThreadPool) -> Result<Vec<ResidualReport>> {
    let vc = cfg.verify_config();
    let reports = pool.install(|| {
        checks()
            .par_iter()
            .map(|c| (c.run)(&vc))
            .collect::<vlasov_char::Result<Vec<_>>>()
    })?;
    Ok(reports)
}
