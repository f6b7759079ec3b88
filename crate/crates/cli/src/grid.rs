use crate::error::{CliError, Result};

/// Uniform tensor grid over `(x, t)` (or `(η, τ)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn new(x: (f64, f64), nx: usize, t: (f64, f64), nt: usize) -> Result<Self> {
        check_axis("x", x, nx)?;
        check_axis("t", t, nt)?;
        Ok(Self {
            x_min: x.0,
            x_max: x.1,
            nx,
            t_min: t.0,
            t_max: t.1,
            nt,
        })
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.nt)
    }
}

fn check_axis(name: &str, (lo, hi): (f64, f64), n: usize) -> Result<()> {
    if n < 2 {
        return Err(CliError::Config(format!(
            "{name} grid needs at least 2 points, got {n}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Config(format!(
            "{name} range [{lo}, {hi}] is empty or not finite"
        )));
    }
    Ok(())
}

/// `n` equally spaced points with both ends hit exactly.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}
