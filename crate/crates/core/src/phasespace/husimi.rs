use faer::Mat;
use rayon::prelude::*;

use super::coherent::CoherentFactory;
use super::grid::{Field, TorusGrid};
use crate::linalg::{norm2, unitarity_defect, CMat, C64, ZERO};
use crate::{Error, Result};

/// Orthonormality defect above which a Husimi sum carries a warning.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

/// Husimi sum of a set of states.
#[derive(Clone, Debug)]
pub struct HusimiSum {
    pub field: Field,
    /// `max |S^H S - I|` of the input set.
    pub orthonormality_defect: f64,
    pub warning: Option<String>,
}

/// `|<z(q,p)|psi>|^2` at every cell centre.
pub fn husimi(state: &[C64], grid: &TorusGrid, factory: &CoherentFactory) -> Result<Field> {
    if state.len() != factory.n {
        return Err(Error::DimensionMismatch { expected: factory.n, found: state.len() });
    }
    let norm = norm2(state);
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm });
    }
    let states = Mat::from_fn(state.len(), 1, |i, _| state[i]);
    Ok(Field { grid: *grid, values: evaluate(&states, grid, factory) })
}

/// Pointwise sum of the Husimi distributions of the columns of `states`.
pub fn husimi_sum(states: &CMat, grid: &TorusGrid, factory: &CoherentFactory) -> Result<HusimiSum> {
    if states.nrows() != factory.n {
        return Err(Error::DimensionMismatch { expected: factory.n, found: states.nrows() });
    }
    let defect = if states.ncols() == 0 { 0.0 } else { unitarity_defect(states) };
    let warning = (defect > ORTHONORMALITY_TOL).then(|| {
        let msg = format!("state set is not orthonormal (defect {defect:.3e})");
        log::warn!("{msg}");
        msg
    });
    Ok(HusimiSum { field: Field { grid: *grid, values: evaluate(states, grid, factory) }, orthonormality_defect: defect, warning })
}

/// Husimi sum over selected columns of `basis`.
pub fn husimi_sum_columns(
    basis: &CMat,
    columns: &[usize],
    grid: &TorusGrid,
    factory: &CoherentFactory,
) -> Result<HusimiSum> {
    if let Some(&bad) = columns.iter().find(|&&c| c >= basis.ncols()) {
        return Err(Error::InvalidParameter(format!("column {bad} out of range")));
    }
    let states = Mat::from_fn(basis.nrows(), columns.len(), |i, j| basis[(i, columns[j])]);
    husimi_sum(&states, grid, factory)
}

/// One `q` column of the grid at a time: the coherent states for all `p`
/// share a window of sites, so they are stacked into a bank `B` (`np x w`,
/// conjugated) and the overlaps come from one product. Large sets go through
/// the projector `P = S S^H` restricted to the window instead.
fn evaluate(states: &CMat, grid: &TorusGrid, factory: &CoherentFactory) -> Vec<f64> {
    let m = states.ncols();
    let projector = if m > 2 * window_width(factory) { Some(states * states.adjoint()) } else { None };
    let rows: Vec<Vec<f64>> = (0..grid.nq)
        .into_par_iter()
        .map(|iq| {
            let q0 = grid.q(iq);
            let window = factory.window(q0);
            let w = window.sites.len();
            let mut bank = Mat::from_fn(grid.np, w, |_, _| ZERO);
            let mut buf = vec![ZERO; w];
            for ip in 0..grid.np {
                factory.windowed(&window, grid.p(ip), &mut buf);
                for (t, z) in buf.iter().enumerate() {
                    bank[(ip, t)] = z.conj();
                }
            }
            match &projector {
                Some(p) => {
                    let pw = Mat::from_fn(w, w, |a, b| p[(window.sites[a], window.sites[b])]);
                    let t = &bank * &pw;
                    (0..grid.np)
                        .map(|ip| {
                            let v: f64 = (0..w).map(|b| (t[(ip, b)] * bank[(ip, b)].conj()).re).sum();
                            v.max(0.0)
                        })
                        .collect()
                }
                None => {
                    let g = Mat::from_fn(w, m, |a, j| states[(window.sites[a], j)]);
                    let amp = &bank * &g;
                    (0..grid.np).map(|ip| (0..m).map(|j| amp[(ip, j)].norm_sqr()).sum()).collect()
                }
            }
        })
        .collect();
    rows.concat()
}

fn window_width(factory: &CoherentFactory) -> usize {
    factory.window(0.5).sites.len()
}
