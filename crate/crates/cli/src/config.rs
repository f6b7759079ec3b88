use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use vlasov_char::bridge::ResidualConfig;
use vlasov_char::verify::VerifyConfig;
use vlasov_char::well::{FluxParsing, TruncationPolicy, WellParams};

use crate::error::{CliError, Result};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Every key accepted in a config file (and, with `-` for `_`, as a flag).
pub const KEYS: &[&str] = &[
    "mu",
    "beta",
    "a",
    "adot",
    "m",
    "hbar",
    "nx",
    "nt",
    "nv",
    "x_min",
    "x_max",
    "t_min",
    "t_max",
    "times",
    "out",
    "format",
    "trunc_tol",
    "trunc_k",
    "flux_parsing",
    "fd_delta",
    "tol_constant",
];

/// Validated run settings. Grid fields left as `None` take per-command
/// defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: WellParams,
    pub mu: Option<u32>,
    pub beta: f64,
    pub adot: f64,
    pub truncation: TruncationPolicy,
    pub flux_parsing: FluxParsing,
    pub nx: Option<usize>,
    pub nt: Option<usize>,
    pub nv: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub residual: ResidualConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: WellParams::default(),
            mu: None,
            beta: 0.01,
            adot: 1.0,
            truncation: TruncationPolicy::default(),
            flux_parsing: FluxParsing::default(),
            nx: None,
            nt: None,
            nv: None,
            x_min: None,
            x_max: None,
            t_min: None,
            t_max: None,
            times: None,
            residual: ResidualConfig::default(),
            out: None,
            format: Format::Csv,
        }
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// keys may use `-` or `_`.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {}: expected key = value",
                no + 1
            )));
        };
        let key = normalize_key(k);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "line {}: unknown key `{}`",
                no + 1,
                k.trim()
            )));
        }
        map.insert(key, v.trim().to_owned());
    }
    Ok(map)
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Reads `file` (if any), then applies `overrides` on top: flags win.
    pub fn load(file: Option<&Path>, overrides: &[(&str, String)]) -> Result<Self> {
        let mut map = match file {
            Some(p) => parse_kv(&fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
            None => BTreeMap::new(),
        };
        for (k, v) in overrides {
            let key = normalize_key(k);
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("unknown key `{k}`")));
            }
            map.insert(key, v.clone());
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = Self::default();
        let (mut m, mut hbar, mut a) = (cfg.params.m, cfg.params.hbar, cfg.params.a);
        let mut trunc_tol = cfg.truncation.term_tol;
        let mut trunc_k = None;
        for (key, value) in map {
            let v = value.as_str();
            match key.as_str() {
                "mu" => cfg.mu = Some(parse(key, v)?),
                "beta" => cfg.beta = parse(key, v)?,
                "a" => a = parse(key, v)?,
                "adot" => cfg.adot = parse(key, v)?,
                "m" => m = parse(key, v)?,
                "hbar" => hbar = parse(key, v)?,
                "nx" => cfg.nx = Some(parse(key, v)?),
                "nt" => cfg.nt = Some(parse(key, v)?),
                "nv" => cfg.nv = Some(parse(key, v)?),
                "x_min" => cfg.x_min = Some(parse(key, v)?),
                "x_max" => cfg.x_max = Some(parse(key, v)?),
                "t_min" => cfg.t_min = Some(parse(key, v)?),
                "t_max" => cfg.t_max = Some(parse(key, v)?),
                "times" => {
                    let ts = v
                        .split(',')
                        .map(|s| parse::<f64>(key, s.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    cfg.times = Some(ts);
                }
                "out" => cfg.out = Some(PathBuf::from(v)),
                "format" => {
                    cfg.format = match v {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(CliError::Config(format!("format must be csv or json, got `{v}`"))),
                    }
                }
                "trunc_tol" => trunc_tol = parse(key, v)?,
                "trunc_k" => trunc_k = Some(parse::<usize>(key, v)?),
                "flux_parsing" => {
                    cfg.flux_parsing = match v {
                        "cosine-of-product" => FluxParsing::CosineOfProduct,
                        "factor-outside-cosine" => FluxParsing::FactorOutsideCosine,
                        _ => {
                            return Err(CliError::Config(format!(
                                "flux_parsing must be cosine-of-product or factor-outside-cosine, got `{v}`"
                            )))
                        }
                    }
                }
                "fd_delta" => cfg.residual.delta = parse(key, v)?,
                "tol_constant" => cfg.residual.tol_constant = parse(key, v)?,
                other => return Err(CliError::Config(format!("unknown key `{other}`"))),
            }
        }
        cfg.params = WellParams::new(m, hbar, a)?;
        cfg.truncation = match trunc_k {
            Some(k) => TruncationPolicy {
                term_tol: trunc_tol,
                ..TruncationPolicy::fixed(k)
            },
            None => TruncationPolicy::adaptive(trunc_tol),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.truncation.validate()?;
        for (name, value) in [
            ("beta", self.beta),
            ("adot", self.adot),
            ("fd_delta", self.residual.delta),
            ("tol_constant", self.residual.tol_constant),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CliError::Config(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.mu == Some(0) {
            return Err(CliError::Config("mu must be >= 1".into()));
        }
        if let Some(ts) = &self.times {
            if ts.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(CliError::Config(
                    "times must be finite and non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn mu_or(&self, default: u32) -> u32 {
        self.mu.unwrap_or(default)
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            params: self.params,
            mu: self.mu_or(1),
            beta: self.beta,
            adot: self.adot,
            truncation: self.truncation,
            flux_parsing: self.flux_parsing,
            residual: self.residual,
        }
    }
}
