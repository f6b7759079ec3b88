use crate::{Error, Result};

/// Linear sizes `Δa^(l)`, `l = 0..n`, of the phase box. `Δa^(0)` is the well
/// width; for `n = 2` the second entry is the velocity range `ȧ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseBox {
    widths: Vec<f64>,
}

impl PhaseBox {
    pub fn new(widths: Vec<f64>) -> Result<Self> {
        if widths.is_empty() {
            return Err(Error::InvalidOrder(0));
        }
        for &w in &widths {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositive {
                    name: "box width",
                    value: w,
                });
            }
        }
        Ok(Self { widths })
    }

    /// The `(x, v)` box `[0, a] × [0, ȧ]`.
    pub fn two(a: f64, adot: f64) -> Result<Self> {
        Self::new(vec![a, adot])
    }

    pub fn order(&self) -> usize {
        self.widths.len()
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn width(&self, l: usize) -> f64 {
        self.widths[l]
    }

    /// `Π_{l≥1} Δa^(l)`.
    pub fn upper_volume(&self) -> f64 {
        self.widths[1..].iter().product()
    }

    /// `Π_{l≥0} Δa^(l)`.
    pub fn volume(&self) -> f64 {
        self.widths.iter().product()
    }

    pub(crate) fn require_order(&self, n: usize) -> Result<()> {
        if self.order() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "phase box has {} widths but the phase point has order {n}",
                self.order()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchTag {
    /// `v ∈ (0, x/t)`
    B1,
    /// `v ∈ (0, ȧ)`
    B2,
    /// `v ∈ ((x − a)/t, x/t)`
    B3,
    /// `v ∈ ((x − a)/t, ȧ)`
    B4,
    /// Outside the support strip `0 <= x < ȧt + a`.
    Outside,
}

/// Region of the `(x, t)` plane together with its velocity limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub tag: BranchTag,
    /// `(v_1, v_2)`; `None` outside the support.
    pub v_limits: Option<(f64, f64)>,
}

/// Classifies `(x, t)` into one of the four piecewise regions.
///
/// The lower limit switches from `0` to `(x − a)/t` at `x = a` and the upper
/// one from `x/t` to `ȧ` at `x = ȧt`. Intervals are half-open on the right,
/// so each point of the strip lands in exactly one branch. At `t = 0` every
/// point of `[0, a)` is in `B2`.
pub fn classify_region(x: f64, t: f64, bx: &PhaseBox) -> Result<Branch> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if bx.order() < 2 {
        return Err(Error::InvalidOrder(bx.order()));
    }
    let (a, adot) = (bx.width(0), bx.width(1));
    if x < 0.0 || x >= adot * t + a || x.is_nan() {
        return Ok(Branch {
            tag: BranchTag::Outside,
            v_limits: None,
        });
    }
    let low_zero = x < a;
    let high_ramp = x < adot * t;
    let v1 = if low_zero { 0.0 } else { (x - a) / t };
    let v2 = if high_ramp { x / t } else { adot };
    let tag = match (low_zero, high_ramp) {
        (true, true) => BranchTag::B1,
        (true, false) => BranchTag::B2,
        (false, true) => BranchTag::B3,
        (false, false) => BranchTag::B4,
    };
    Ok(Branch {
        tag,
        v_limits: Some((v1, v2)),
    })
}

/// Corners of the `(x, v)` support `{0 <= x − vt <= a, 0 <= v <= ȧ}`,
/// counter-clockwise.
pub fn support_polygon(t: f64, bx: &PhaseBox) -> [(f64, f64); 4] {
    let (a, adot) = (bx.width(0), bx.width(1));
    [(0.0, 0.0), (a, 0.0), (a + adot * t, adot), (adot * t, adot)]
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(corners: &[(f64, f64)]) -> f64 {
    let n = corners.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (x0, y0) = corners[i];
            let (x1, y1) = corners[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum();
    0.5 * twice.abs()
}
