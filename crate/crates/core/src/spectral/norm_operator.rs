//! Eigenvectors of the norm operator `W(t) = U^t (U^t)^H`.
//!
//! `W(t)` is never formed. The left singular vectors of `U^t` are carried from
//! step to step as an orthonormal basis `Q` and log singular values `s`:
//! `U^t = Q diag(exp s) Y^H` gives `U^(t+1) = (U Q diag(exp s)) Y^H`, and the
//! bracket is re-diagonalised by one-sided Jacobi rotations acting on columns
//! stored as `(log scale, unit vector)`. Growth of `exp(s)` therefore never
//! reaches the floating-point range, whatever `t` is.

use faer::Mat;

use super::schur::ordered_schur;
use crate::linalg::{dot, norm2, singular_values, CMat, C64};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct NormOperatorIteration {
    u: CMat,
    basis: CMat,
    log_sigma: Vec<f64>,
    t: usize,
}

impl NormOperatorIteration {
    pub fn new(u: &CMat) -> Result<Self> {
        let n = u.nrows();
        if n != u.ncols() {
            return Err(Error::DimensionMismatch { expected: n, found: u.ncols() });
        }
        Ok(Self { u: u.clone(), basis: crate::linalg::identity(n), log_sigma: vec![0.0; n], t: 0 })
    }

    pub fn time(&self) -> usize {
        self.t
    }

    /// Orthonormal eigenvectors of `W(t)`, by decreasing eigenvalue.
    pub fn vectors(&self) -> &CMat {
        &self.basis
    }

    /// `ln` of the eigenvalues of `W(t)`, decreasing.
    pub fn log_eigenvalues(&self) -> Vec<f64> {
        self.log_sigma.iter().map(|s| 2.0 * s).collect()
    }

    pub fn advance_to(&mut self, t: usize) -> Result<()> {
        if t < self.t {
            return Err(Error::InvalidParameter(format!("cannot go back from t = {} to t = {t}", self.t)));
        }
        while self.t < t {
            self.step()?;
        }
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        let step = self.t + 1;
        let n = self.u.nrows();
        let b = &self.u * &self.basis;
        let mut s = self.log_sigma.clone();
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        for (j, sj) in s.iter_mut().enumerate() {
            let mut c = b.col_as_slice(j).to_vec();
            let nb = norm2(&c);
            if !nb.is_finite() {
                return Err(Error::ScalingBreakdown { step });
            }
            if nb == 0.0 {
                return Err(Error::Numerical(format!("operator annihilates a basis vector at step {step}")));
            }
            *sj += nb.ln();
            c.iter_mut().for_each(|z| *z /= nb);
            cols.push(c);
        }
        jacobi(&mut cols, &mut s, step)?;

        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
        self.basis = Mat::from_fn(n, n, |i, j| cols[idx[j]][i]);
        self.log_sigma = idx.iter().map(|&j| s[j]).collect();
        if self.log_sigma.iter().any(|x| !x.is_finite()) {
            return Err(Error::ScalingBreakdown { step });
        }
        self.t = step;
        Ok(())
    }
}

/// One-sided Jacobi on the columns `exp(s_j) x_j` until they are mutually
/// orthogonal.
fn jacobi(cols: &mut [Vec<C64>], s: &mut [f64], step: usize) -> Result<()> {
    let n = cols.len();
    let tol = f64::EPSILON * n as f64;
    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let g = dot(&cols[i], &cols[j]);
                let ag = g.norm();
                if ag <= tol {
                    continue;
                }
                rotated = true;
                // Work with (small, big) by log scale; g_sb = x_small^H x_big.
                let (sm, bg, g_sb) = if s[i] <= s[j] { (i, j, g) } else { (j, i, g.conj()) };
                let phase = (g_sb / ag).conj();
                let d = s[bg] - s[sm];
                let e2 = (-2.0 * d).exp();
                let ze = (1.0 - e2) / (2.0 * ag);
                let tau = 1.0 / (ze + (e2 + ze * ze).sqrt());
                let t = tau * (-d).exp();
                let c = 1.0 / (1.0 + t * t).sqrt();
                let cross = c * tau * e2;

                let (xs, xb) = if sm < bg {
                    let (a, b) = cols.split_at_mut(bg);
                    (&mut a[sm], &mut b[0])
                } else {
                    let (a, b) = cols.split_at_mut(sm);
                    (&mut b[0], &mut a[bg])
                };
                for (zs, zb) in xs.iter_mut().zip(xb.iter_mut()) {
                    let (a, b) = (*zs, *zb);
                    *zs = a * c - phase * b * (c * tau);
                    *zb = a * cross + phase * b * c;
                }
                for (col, k) in [(xs, sm), (xb, bg)] {
                    let nrm = norm2(col);
                    if !(nrm > 0.0) || !nrm.is_finite() {
                        return Err(Error::ScalingBreakdown { step });
                    }
                    s[k] += nrm.ln();
                    col.iter_mut().for_each(|z| *z /= nrm);
                }
            }
        }
        if !rotated {
            log::trace!("step {step}: Jacobi converged after {sweep} sweeps");
            return Ok(());
        }
    }
    Err(Error::NoConvergence { index: step, iterations: MAX_SWEEPS })
}

/// Agreement between the `W(t)` eigenvectors and a Schur basis.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub t: usize,
    /// `|<v_n|w_n>|` per index.
    pub overlaps: Vec<f64>,
    /// Sine of the largest principal angle between the leading-`k` subspaces,
    /// entry `k - 1` for `k = 1..=N`.
    pub subspace_sines: Vec<f64>,
}

impl ConvergenceReport {
    pub fn max_subspace_sine(&self) -> f64 {
        self.subspace_sines.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_overlap(&self) -> f64 {
        self.overlaps.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn compare_bases(t: usize, w: &CMat, v: &CMat) -> Result<ConvergenceReport> {
    let n = v.ncols();
    if w.nrows() != v.nrows() || w.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w.ncols() });
    }
    let overlaps = (0..n).map(|k| dot(v.col_as_slice(k), w.col_as_slice(k)).norm()).collect();
    let mut subspace_sines = Vec::with_capacity(n);
    for k in 1..=n {
        let wk = w.subcols(0, k).to_owned();
        let vk = v.subcols(0, k).to_owned();
        let proj = &vk * (vk.adjoint() * &wk);
        let e = &wk - &proj;
        let sv = singular_values(&e)?;
        subspace_sines.push(sv.iter().copied().fold(0.0, f64::max).min(1.0));
    }
    Ok(ConvergenceReport { t, overlaps, subspace_sines })
}

/// Result of [`norm_operator_eigvecs`].
#[derive(Clone, Debug)]
pub struct NormOperatorEigs {
    pub vectors: CMat,
    pub log_eigenvalues: Vec<f64>,
    pub report: ConvergenceReport,
}

/// Eigenvectors of `W(t)` together with their agreement with the ordered
/// Schur vectors of `u`.
pub fn norm_operator_eigvecs(u: &CMat, t: usize) -> Result<NormOperatorEigs> {
    Ok(norm_operator_trajectory(u, &[t])?.pop().expect("one entry"))
}

/// Same as [`norm_operator_eigvecs`] for an increasing list of times, reusing
/// the iteration between them.
pub fn norm_operator_trajectory(u: &CMat, times: &[usize]) -> Result<Vec<NormOperatorEigs>> {
    let schur = ordered_schur(u)?;
    norm_operator_trajectory_against(u, &schur.v, times)
}

/// As [`norm_operator_trajectory`], comparing against a given reference basis.
pub fn norm_operator_trajectory_against(u: &CMat, reference: &CMat, times: &[usize]) -> Result<Vec<NormOperatorEigs>> {
    if times.iter().any(|&t| t == 0) {
        return Err(Error::InvalidParameter("times must be >= 1".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("times must be non-decreasing".into()));
    }
    let mut it = NormOperatorIteration::new(u)?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        it.advance_to(t)?;
        let report = compare_bases(t, it.vectors(), reference)?;
        out.push(NormOperatorEigs { vectors: it.vectors().clone(), log_eigenvalues: it.log_eigenvalues(), report });
    }
    Ok(out)
}

/// Leading-`k` principal-angle sines between two bases (columns).
pub fn subspace_sine(a: &CMat, b: &CMat, k: usize) -> Result<f64> {
    let ak = a.subcols(0, k).to_owned();
    let bk = b.subcols(0, k).to_owned();
    let e = &ak - &(&bk * (bk.adjoint() * &ak));
    Ok(singular_values(&e)?.iter().copied().fold(0.0, f64::max))
}
