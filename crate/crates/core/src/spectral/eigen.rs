use faer::Mat;

use super::schur::ordered_schur;
use crate::linalg::{adjoint, frobenius, inverse, matvec, CMat, C64, ONE, ZERO};
use crate::{Error, Result};

pub const DEFAULT_CONDITION_LIMIT: f64 = 1e12;

/// Right and left eigenvectors scaled so that `<chi_n|phi_k> = delta_nk`.
///
/// `right` holds `|phi_n>` as columns; `left` holds `|chi_n>` as columns, so
/// `left^H right = I`.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<C64>,
    pub right: CMat,
    pub left: CMat,
    /// `||S||_F ||S^-1||_F` for the column-normalised right eigenvector matrix.
    pub condition: f64,
    pub near_exceptional: bool,
}

impl EigenPairs {
    /// `max |left^H right - I|`.
    pub fn biorthogonality_residual(&self) -> f64 {
        let g = self.left.adjoint() * &self.right;
        let n = g.nrows();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let t = if i == j { ONE } else { ZERO };
                m = m.max((g[(i, j)] - t).norm());
            }
        }
        m
    }
}

pub fn eigendecompose_biorthogonal(m: &CMat) -> Result<EigenPairs> {
    eigendecompose_biorthogonal_with(m, DEFAULT_CONDITION_LIMIT)
}

/// Eigenpairs in Schur order. Right eigenvectors come from back-substitution on
/// the triangular factor; the left ones are the rows of the inverse.
pub fn eigendecompose_biorthogonal_with(m: &CMat, condition_limit: f64) -> Result<EigenPairs> {
    let schur = ordered_schur(m)?;
    let n = schur.dim();
    let r = &schur.r;
    let scale = crate::linalg::max_abs(r).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;

    let mut y = Mat::from_fn(n, n, |_, _| ZERO);
    for k in 0..n {
        let lambda = r[(k, k)];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in (i + 1)..=k {
                s += r[(i, j)] * y[(j, k)];
            }
            let mut d = r[(i, i)] - lambda;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut right = &schur.v * &y;
    for k in 0..n {
        let col = right.col_as_slice_mut(k);
        let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::Numerical(format!("eigenvector {k} could not be normalised")));
        }
        col.iter_mut().for_each(|z| *z /= nrm);
    }
    let inv = inverse(&right);
    let condition = frobenius(&right) * frobenius(&inv);
    let near_exceptional = !condition.is_finite() || condition > condition_limit;
    if near_exceptional {
        log::warn!("eigenvector matrix is ill conditioned (estimate {condition:.3e}); near an exceptional point");
    }
    let left = adjoint(&inv);
    Ok(EigenPairs { values: schur.eigenvalues(), right, left, condition, near_exceptional })
}

/// Coefficients `psi_n = <chi_n|psi>`.
pub fn expand_in_eigenbasis(pairs: &EigenPairs, psi: &[C64]) -> Result<Vec<C64>> {
    let n = pairs.values.len();
    if psi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: psi.len() });
    }
    if pairs.near_exceptional {
        log::warn!("expanding in a near-exceptional eigenbasis");
    }
    Ok((0..n).map(|k| crate::linalg::dot(pairs.left.col_as_slice(k), psi)).collect())
}

/// `sum_n c_n |phi_n>`.
pub fn reconstruct(pairs: &EigenPairs, coefficients: &[C64]) -> Vec<C64> {
    matvec(&pairs.right, coefficients)
}
