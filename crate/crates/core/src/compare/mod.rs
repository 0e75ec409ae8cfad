//! Jensen–Shannon divergence between phase-space fields and the final-time
//! scan built on it.

use std::io::Write;

use crate::classical::{norm_landscape_series, ClassicalMap, Ensemble, NormLandscape};
use crate::density::{solve_threshold, SupportMode};
use crate::io::fmt17;
use crate::phasespace::Field;
use crate::{Error, Result};

/// Base-2 Jensen–Shannon divergence of two non-negative fields, each
/// normalised to a probability distribution over the cells.
///
/// Every term is weighted by the raw cell value and divided by the total
/// afterwards, so identical fields give exactly 0 and disjoint ones exactly 1.
pub fn jsd(p: &Field, q: &Field) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::DimensionMismatch { expected: p.grid.len(), found: q.grid.len() });
    }
    for f in [p, q] {
        if f.values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("fields must be finite and non-negative".into()));
        }
    }
    let sp: f64 = p.values.iter().sum();
    let sq: f64 = q.values.iter().sum();
    if sp == 0.0 || sq == 0.0 {
        return Err(Error::ZeroMass);
    }
    let (mut a, mut b) = (0.0, 0.0);
    for (&pv, &qv) in p.values.iter().zip(&q.values) {
        let pi = pv / sp;
        let qi = qv / sq;
        let mi = (pi + qi) / 2.0;
        if pv > 0.0 {
            a += pv * (pi / mi).log2();
        }
        if qv > 0.0 {
            b += qv * (qi / mi).log2();
        }
    }
    Ok((0.5 * (a / sp) + 0.5 * (b / sq)).clamp(0.0, 1.0))
}

/// Sums `factor x factor` blocks of cells.
pub fn coarsen(f: &Field, factor: usize) -> Result<Field> {
    f.coarsen(factor)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub t_f: usize,
    pub delta: Option<f64>,
    pub jsd: Option<f64>,
    /// `ok` or the reason the row failed.
    pub status: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    /// Row with the smallest divergence.
    pub fn argmin(&self) -> Option<&ScanRow> {
        self.rows
            .iter()
            .filter(|r| r.jsd.is_some())
            .min_by(|a, b| a.jsd.unwrap().total_cmp(&b.jsd.unwrap()).then(a.t_f.cmp(&b.t_f)))
    }

    /// At least five consecutive rows within 10% of the minimum.
    pub fn plateau(&self) -> bool {
        let Some(min) = self.argmin().and_then(|r| r.jsd) else { return false };
        let mut run = 0;
        for r in &self.rows {
            match r.jsd {
                Some(j) if j <= 1.1 * min => {
                    run += 1;
                    if run >= 5 {
                        return true;
                    }
                }
                _ => run = 0,
            }
        }
        false
    }

    /// `(max - min) / min` of the divergence over successful rows with
    /// `|t_f - t*| <= fraction * t*`, `t*` the argmin.
    pub fn window_variation(&self, fraction: f64) -> Option<f64> {
        let best = self.argmin()?;
        let t0 = best.t_f as f64;
        let js: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| (r.t_f as f64 - t0).abs() <= fraction * t0)
            .filter_map(|r| r.jsd)
            .collect();
        let lo = js.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = js.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((hi - lo) / lo)
    }

    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| r.jsd.is_none())
    }

    /// `t_f,delta,jsd,status`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t_f,delta,jsd,status")?;
        let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.t_f, opt(r.delta), opt(r.jsd), r.status.replace(',', ";"))?;
        }
        Ok(())
    }
}

/// Scan over precomputed landscapes: for each, solve the threshold for
/// `target` states and compare the density with `quantum`.
pub fn scan_landscapes(
    quantum: &Field,
    landscapes: &[NormLandscape],
    mode: SupportMode,
    target: usize,
    dim: usize,
) -> ScanResult {
    let rows = landscapes
        .iter()
        .map(|l| {
            let outcome = solve_threshold(l, mode, target, dim)
                .and_then(|d| Ok((d.delta(), jsd(quantum, &d.field)?)));
            match outcome {
                Ok((delta, j)) => ScanRow { t_f: l.t_f, delta: Some(delta), jsd: Some(j), status: "ok".into() },
                Err(e) => {
                    log::info!("t_f = {}: {e}", l.t_f);
                    ScanRow { t_f: l.t_f, delta: None, jsd: None, status: e.to_string() }
                }
            }
        })
        .collect();
    ScanResult { rows }
}

/// Builds the landscapes for `times` (sharing trajectories) and scans them.
#[allow(clippy::too_many_arguments)]
pub fn tf_scan(
    quantum: &Field,
    map: &ClassicalMap,
    ensemble: &Ensemble,
    times: &[usize],
    mode: SupportMode,
    target: usize,
    dim: usize,
) -> Result<ScanResult> {
    let landscapes = norm_landscape_series(map, &quantum.grid, times, ensemble)?;
    Ok(scan_landscapes(quantum, &landscapes, mode, target, dim))
}
