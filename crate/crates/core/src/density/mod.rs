//! Support sets of a norm landscape, their Gaussian-smoothed densities and the
//! Planck-cell counting condition that fixes the thresholds.
//!
//! Thresholds are compared with `ln <w>` in log space:
//!
//! | mode   | set                                   |
//! |--------|---------------------------------------|
//! | gain   | `ln <w> >  2 gamma Delta`             |
//! | loss   | `ln <w> < -2 gamma Delta`             |
//! | stable | `-2 gamma Delta <= ln <w> <= 2 gamma Delta` |
//! | top-n  | `ln <w> >= -2 gamma Delta`            |

mod smooth;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

pub use smooth::{smooth, smooth_field, smoothing_sigma};

use crate::classical::NormLandscape;
use crate::io::fmt17;
use crate::phasespace::{Field, TorusGrid};
use crate::{Error, Result};

/// Bisection tolerance on the integral, in Planck cells.
pub const COUNT_TOLERANCE: f64 = 0.25;
pub const MAX_BISECTIONS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SupportMode {
    Gain,
    Stable,
    Loss,
    TopN,
}

impl SupportMode {
    pub fn name(self) -> &'static str {
        match self {
            SupportMode::Gain => "gain",
            SupportMode::Stable => "stable",
            SupportMode::Loss => "loss",
            SupportMode::TopN => "top-n",
        }
    }

    /// Whether the set grows with `Delta`.
    fn grows(self) -> bool {
        matches!(self, SupportMode::Stable | SupportMode::TopN)
    }
}

impl fmt::Display for SupportMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SupportMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gain" => Ok(SupportMode::Gain),
            "stable" => Ok(SupportMode::Stable),
            "loss" => Ok(SupportMode::Loss),
            "top-n" | "topn" => Ok(SupportMode::TopN),
            other => Err(Error::InvalidParameter(format!("unknown support mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportSet {
    pub grid: TorusGrid,
    pub mask: Vec<bool>,
    pub mode: SupportMode,
    /// `Delta_+` for the PT modes (`Delta_- = -Delta_+`), `Delta_n` for top-n.
    pub delta: f64,
}

impl SupportSet {
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.cell_area()
    }

    pub fn indicator(&self) -> Field {
        Field { grid: self.grid, values: self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect() }
    }
}

/// `2 gamma Delta`, with `Delta = inf` covering every finite value even when
/// `gamma = 0`.
fn log_threshold(gamma: f64, delta: f64) -> f64 {
    if delta.is_infinite() {
        f64::INFINITY
    } else {
        2.0 * gamma * delta
    }
}

fn member(mode: SupportMode, ln_w: f64, thr: f64) -> bool {
    match mode {
        SupportMode::Gain => ln_w > thr,
        SupportMode::Loss => ln_w < -thr,
        SupportMode::Stable => -thr <= ln_w && ln_w <= thr,
        SupportMode::TopN => ln_w >= -thr,
    }
}

pub fn support_set(landscape: &NormLandscape, mode: SupportMode, delta: f64) -> Result<SupportSet> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("Delta must be >= 0, got {delta}")));
    }
    let thr = log_threshold(landscape.map.gamma().abs(), delta);
    let mask = landscape.ln_mean_w.values.iter().map(|&v| member(mode, v, thr)).collect();
    Ok(SupportSet { grid: landscape.grid(), mask, mode, delta })
}

/// One bisection step of [`solve_threshold`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectionStep {
    pub lo: f64,
    pub hi: f64,
    pub delta: f64,
    pub area: f64,
}

#[derive(Clone, Debug)]
pub struct DensityField {
    pub field: Field,
    pub set: SupportSet,
    /// Number of states `n` the density is conditioned on.
    pub target: usize,
    /// Hilbert-space dimension `N`; one Planck cell has area `1/N`.
    pub dim: usize,
    /// `integral D dq dp` as achieved.
    pub integral: f64,
    pub log: Vec<BisectionStep>,
}

impl DensityField {
    pub fn delta(&self) -> f64 {
        self.set.delta
    }

    /// Classical fraction `f_C = integral / (N h) = integral`.
    pub fn fraction(&self) -> f64 {
        self.integral
    }

    pub fn write_log<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# mode {} target {} of {} states", self.set.mode, self.target, self.dim)?;
        writeln!(w, "iteration,lo,hi,delta,area")?;
        for (i, s) in self.log.iter().enumerate() {
            writeln!(w, "{i},{},{},{},{}", fmt17(s.lo), fmt17(s.hi), fmt17(s.delta), fmt17(s.area))?;
        }
        writeln!(w, "# final delta {} integral {}", fmt17(self.delta()), fmt17(self.integral))?;
        Ok(())
    }
}

/// Finds `Delta` such that the smoothed support set holds `target` Planck
/// cells of a `dim`-dimensional space, within a quarter cell.
///
/// The smoothing kernel has unit mass, so the integral of the density is the
/// area of the mask; the bisection runs on mask areas and smooths once at the
/// end. The masks are nested in `Delta`, so the area is monotone and the
/// bisection brackets the crossing; the bracket end closer to the target wins.
pub fn solve_threshold(
    landscape: &NormLandscape,
    mode: SupportMode,
    target: usize,
    dim: usize,
) -> Result<DensityField> {
    if dim == 0 || target > dim {
        return Err(Error::InvalidParameter(format!("target {target} must lie in 0..={dim}")));
    }
    let values = &landscape.ln_mean_w.values;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("landscape has non-finite values".into()));
    }
    let gamma = landscape.map.gamma().abs();
    let cell = landscape.grid().cell_area();
    let goal = target as f64 / dim as f64;
    let tol = COUNT_TOLERANCE / dim as f64;

    let area = |delta: f64| -> f64 {
        let thr = log_threshold(gamma, delta);
        values.iter().filter(|&&v| member(mode, v, thr)).count() as f64 * cell
    };
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let hi_start = if gamma > 0.0 && max_abs > 0.0 { max_abs / (2.0 * gamma) * (1.0 + 1e-9) + f64::MIN_POSITIVE } else { 0.0 };

    let (a_lo, a_hi) = (area(0.0), area(hi_start));
    let (min_area, max_area) = if mode.grows() { (a_lo, a_hi) } else { (a_hi, a_lo) };
    if goal < min_area - tol || goal > max_area + tol {
        return Err(Error::UnreachableTarget { target: goal, min_area, max_area, lo: 0.0, hi: hi_start });
    }

    let reached = |a: f64| if mode.grows() { a >= goal } else { a <= goal };
    let mut log = Vec::new();
    let delta = if reached(a_lo) {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, hi_start);
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            let a = area(mid);
            log.push(BisectionStep { lo, hi, delta: mid, area: a });
            log::debug!("bisection: [{lo:.6e}, {hi:.6e}] Delta={mid:.6e} area={a:.6e} goal={goal:.6e}");
            if reached(a) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        if (area(lo) - goal).abs() < (area(hi) - goal).abs() {
            lo
        } else {
            hi
        }
    };

    let set = support_set(landscape, mode, delta)?;
    let achieved = set.area();
    if (achieved - goal).abs() > tol {
        return Err(Error::UnreachableTarget { target: goal, min_area, max_area, lo: delta, hi: delta });
    }
    let field = smooth(&set, smoothing_sigma(dim));
    let integral = field.integral();
    Ok(DensityField { field, set, target, dim, integral, log })
}

/// Smoothed gain, stable and loss densities for one `Delta`.
pub fn pt_partition(landscape: &NormLandscape, delta: f64, sigma: f64) -> Result<[Field; 3]> {
    Ok([
        smooth(&support_set(landscape, SupportMode::Gain, delta)?, sigma),
        smooth(&support_set(landscape, SupportMode::Stable, delta)?, sigma),
        smooth(&support_set(landscape, SupportMode::Loss, delta)?, sigma),
    ])
}
