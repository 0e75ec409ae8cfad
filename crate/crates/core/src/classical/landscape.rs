use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::maps::{ClassicalMap, MapState};
use crate::phasespace::{Field, TorusGrid};
use crate::{Error, Result};

/// Initial conditions drawn around each cell centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ensemble {
    pub samples: usize,
    /// Standard deviation of the isotropic Gaussian, in both `q` and `p`.
    pub sigma: f64,
    pub seed: u64,
}

impl Ensemble {
    /// 16 samples with the coherent-state width `sqrt(hbar / 2)` for dimension `n`.
    pub fn for_dimension(n: usize, seed: u64) -> Self {
        let hbar = 1.0 / (2.0 * std::f64::consts::PI * n as f64);
        Self { samples: 16, sigma: (hbar / 2.0).sqrt(), seed }
    }

    /// One unperturbed trajectory per cell.
    pub fn single() -> Self {
        Self { samples: 1, sigma: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("ensemble needs at least one sample".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("ensemble width must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// `ln <w>` after `t_f` steps of the backward map, per grid cell.
#[derive(Clone, Debug)]
pub struct NormLandscape {
    pub ln_mean_w: Field,
    pub t_f: usize,
    pub ensemble: Ensemble,
    pub map: ClassicalMap,
}

impl NormLandscape {
    pub fn grid(&self) -> TorusGrid {
        self.ln_mean_w.grid
    }

    /// `<w>` itself; may overflow for strong gain and long times.
    pub fn mean_w(&self) -> Field {
        self.ln_mean_w.map(f64::exp)
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut m = vec![
            ("quantity".to_string(), "ln_mean_w".to_string()),
            ("t_f".to_string(), self.t_f.to_string()),
            ("samples".to_string(), self.ensemble.samples.to_string()),
            ("sigma".to_string(), format!("{:?}", self.ensemble.sigma)),
            ("seed".to_string(), self.ensemble.seed.to_string()),
        ];
        m.extend(self.map.describe());
        m
    }

    /// Writes the metadata as `key = value` lines.
    pub fn write_metadata<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in self.metadata() {
            writeln!(w, "{k} = {v}")?;
        }
        Ok(())
    }
}

pub fn norm_landscape(map: &ClassicalMap, grid: &TorusGrid, t_f: usize, ensemble: &Ensemble) -> Result<NormLandscape> {
    Ok(norm_landscape_series(map, grid, &[t_f], ensemble)?.pop().expect("one time"))
}

/// Landscapes at several final times from one set of trajectories. Each cell
/// draws its initial points from its own ChaCha8 stream `(seed, cell)`, so the
/// result does not depend on the times requested or on scheduling.
pub fn norm_landscape_series(
    map: &ClassicalMap,
    grid: &TorusGrid,
    times: &[usize],
    ensemble: &Ensemble,
) -> Result<Vec<NormLandscape>> {
    map.validate()?;
    ensemble.validate()?;
    if times.is_empty() || times.iter().any(|&t| t == 0) {
        return Err(Error::InvalidParameter("final times must be >= 1".into()));
    }
    let t_max = *times.iter().max().expect("non-empty");
    let nt = times.len();
    let m = ensemble.samples;
    let ln_m = (m as f64).ln();

    let per_cell: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|cell| {
            let (q0, p0) = grid.center(cell);
            let mut rng = ChaCha8Rng::seed_from_u64(ensemble.seed);
            rng.set_stream(cell as u64);
            // ln w of every sample at every requested time.
            let mut ln_w = vec![0.0; nt * m];
            for j in 0..m {
                let dq: f64 = rng.sample(StandardNormal);
                let dp: f64 = rng.sample(StandardNormal);
                let mut s = MapState::new(q0 + ensemble.sigma * dq, p0 + ensemble.sigma * dp);
                for t in 1..=t_max {
                    s = map.step(s);
                    for (i, &ti) in times.iter().enumerate() {
                        if ti == t {
                            ln_w[i * m + j] = s.ln_w;
                        }
                    }
                }
            }
            (0..nt).map(|i| log_sum_exp(&ln_w[i * m..(i + 1) * m]) - ln_m).collect()
        })
        .collect();

    Ok((0..nt)
        .map(|i| NormLandscape {
            ln_mean_w: Field { grid: *grid, values: per_cell.iter().map(|v| v[i]).collect() },
            t_f: times[i],
            ensemble: *ensemble,
            map: *map,
        })
        .collect())
}

fn log_sum_exp(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
