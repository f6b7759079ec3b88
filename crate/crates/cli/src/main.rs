use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vlasov_char_cli::{execute, pool_from_env, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "vlasov-char",
    version,
    about = "Exact characteristic solutions of the Vlasov chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Marginal coordinate density f_1(x, t) of a stationary mode lifted to (x, v).
    #[command(name = "density-1d")]
    Density1d(Common),
    /// Mean velocity <v>(x, t) of the same marginal.
    #[command(name = "flux-1d")]
    Flux1d(Common),
    /// Theta-solution density map, flux profiles and characteristic overlay (--out is a directory).
    #[command(name = "theta-maps")]
    ThetaMaps(Common),
    /// (x, v) snapshots of the lifted theta solution with support corners.
    #[command(name = "phase-snapshots")]
    PhaseSnapshots(Common),
    /// Run every verification check and write a JSON report.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mu: Option<u32>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    adot: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
    /// Velocity samples per snapshot (defaults to nx).
    #[arg(long)]
    nv: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long)]
    times: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    trunc_tol: Option<f64>,
    /// Fixed series cutoff K instead of the adaptive one.
    #[arg(long)]
    trunc_k: Option<usize>,
    /// cosine-of-product (correct) or factor-outside-cosine.
    #[arg(long)]
    flux_parsing: Option<String>,
    /// Finite-difference step scale for residual checks.
    #[arg(long)]
    fd_delta: Option<f64>,
    #[arg(long)]
    tol_constant: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        put("mu", self.mu.map(|x| x.to_string()));
        put("beta", self.beta.map(|x| x.to_string()));
        put("a", self.a.map(|x| x.to_string()));
        put("adot", self.adot.map(|x| x.to_string()));
        put("m", self.m.map(|x| x.to_string()));
        put("hbar", self.hbar.map(|x| x.to_string()));
        put("nx", self.nx.map(|x| x.to_string()));
        put("nt", self.nt.map(|x| x.to_string()));
        put("nv", self.nv.map(|x| x.to_string()));
        put("x_min", self.x_min.map(|x| x.to_string()));
        put("x_max", self.x_max.map(|x| x.to_string()));
        put("t_min", self.t_min.map(|x| x.to_string()));
        put("t_max", self.t_max.map(|x| x.to_string()));
        put("times", self.times.clone());
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.clone());
        put("trunc_tol", self.trunc_tol.map(|x| x.to_string()));
        put("trunc_k", self.trunc_k.map(|x| x.to_string()));
        put("flux_parsing", self.flux_parsing.clone());
        put("fd_delta", self.fd_delta.map(|x| x.to_string()));
        put("tol_constant", self.tol_constant.map(|x| x.to_string()));
        out
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Density1d(c) => (Command::Density1d, c),
        Cmd::Flux1d(c) => (Command::Flux1d, c),
        Cmd::ThetaMaps(c) => (Command::ThetaMaps, c),
        Cmd::PhaseSnapshots(c) => (Command::PhaseSnapshots, c),
        Cmd::Verify(c) => (Command::Verify, c),
    };
    let result = RunConfig::load(common.config.as_deref(), &common.overrides())
        .and_then(|cfg| execute(command, &cfg, &pool_from_env()?));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
