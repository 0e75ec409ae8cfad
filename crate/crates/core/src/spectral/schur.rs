//! Complex Schur decomposition with eigenvalues ordered by decreasing modulus.
//!
//! The unordered form comes from a Householder reduction to Hessenberg form
//! followed by implicitly shifted single-shift QR sweeps with Givens rotations.
//! Diagonal entries are then moved into place with adjacent unitary swaps. Each
//! swap writes the two diagonal values back exactly, so the final ordering
//! holds in floating point and not only up to rounding.

use std::cmp::Ordering;

use faer::Mat;

use super::quasi::phase_quasienergy;
use crate::linalg::{adjoint_matmul, frobenius, givens, unitarity_defect, CMat, C64, ONE, ZERO};
use crate::{Error, Result};

/// `U = V R V^H` with `R` upper triangular and `|R_00| >= |R_11| >= ...`.
#[derive(Clone, Debug)]
pub struct OrderedSchur {
    /// Unitary; columns are the Schur vectors.
    pub v: CMat,
    /// Upper triangular.
    pub r: CMat,
    /// `order[i]` is the position on the diagonal of the unordered Schur form of
    /// the eigenvalue now at position `i`.
    pub order: Vec<usize>,
}

impl OrderedSchur {
    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.r[(i, i)]).collect()
    }

    /// `||U V - V R||_F / ||U||_F`.
    pub fn residual(&self, u: &CMat) -> f64 {
        let lhs = u * &self.v;
        let rhs = &self.v * &self.r;
        frobenius(&(&lhs - &rhs)) / frobenius(u)
    }

    /// `max |V^H V - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.v)
    }

    /// Whether the diagonal moduli are non-increasing.
    pub fn is_ordered(&self) -> bool {
        let ev = self.eigenvalues();
        ev.windows(2).all(|w| w[0].norm() >= w[1].norm())
    }

    pub fn strict_lower_max(&self) -> f64 {
        crate::linalg::strict_lower_max(&self.r)
    }
}

/// Schur decomposition with eigenvalues sorted by modulus (descending), then by
/// the phase quasienergy `-arg(lambda)` in `(-pi, pi]` (descending), then by
/// position in the unordered form.
pub fn ordered_schur(u: &CMat) -> Result<OrderedSchur> {
    let n = u.nrows();
    if n != u.ncols() {
        return Err(Error::DimensionMismatch { expected: n, found: u.ncols() });
    }
    let mut w = Work::from_mat(u);
    let mut q = Work::identity(n);
    w.hessenberg(&mut q);
    w.qr_iterate(&mut q)?;
    let order = w.sort_diagonal(&mut q);
    Ok(OrderedSchur { v: q.to_mat(), r: w.to_upper_mat(), order })
}

/// Unordered complex Schur form `(V, T)` of a square matrix.
pub fn schur(u: &CMat) -> Result<(CMat, CMat)> {
    let n = u.nrows();
    if n != u.ncols() {
        return Err(Error::DimensionMismatch { expected: n, found: u.ncols() });
    }
    let mut w = Work::from_mat(u);
    let mut q = Work::identity(n);
    w.hessenberg(&mut q);
    w.qr_iterate(&mut q)?;
    Ok((q.to_mat(), w.to_upper_mat()))
}

/// Moves the diagonal of an existing Schur pair `(V, T)` into `target` order,
/// where `target[i]` names the current diagonal position that should end up at
/// position `i`.
pub fn reorder_schur(v: &CMat, t: &CMat, target: &[usize]) -> Result<(CMat, CMat)> {
    let n = t.nrows();
    let mut seen = vec![false; n];
    if target.len() != n || target.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidParameter("target must be a permutation".into()));
    }
    let mut w = Work::from_mat(t);
    let mut q = Work::from_mat(v);
    w.apply_permutation(&mut q, target);
    Ok((q.to_mat(), w.to_upper_mat()))
}

/// Total order used for the Schur diagonal.
pub(crate) fn diagonal_order(a: (usize, C64), b: (usize, C64)) -> Ordering {
    b.1.norm()
        .total_cmp(&a.1.norm())
        .then_with(|| phase_quasienergy(b.1).total_cmp(&phase_quasienergy(a.1)))
        .then_with(|| a.0.cmp(&b.0))
}

/// Column-major square scratch matrix.
struct Work {
    n: usize,
    a: Vec<C64>,
}

impl Work {
    fn from_mat(m: &CMat) -> Self {
        let n = m.nrows();
        let mut a = Vec::with_capacity(n * n);
        for j in 0..n {
            a.extend_from_slice(m.col_as_slice(j));
        }
        Self { n, a }
    }

    fn identity(n: usize) -> Self {
        let mut a = vec![ZERO; n * n];
        for i in 0..n {
            a[i + i * n] = ONE;
        }
        Self { n, a }
    }

    fn to_mat(&self) -> CMat {
        Mat::from_fn(self.n, self.n, |i, j| self.a[i + j * self.n])
    }

    fn to_upper_mat(&self) -> CMat {
        Mat::from_fn(self.n, self.n, |i, j| if i > j { ZERO } else { self.a[i + j * self.n] })
    }

    #[inline(always)]
    fn at(&self, i: usize, j: usize) -> C64 {
        self.a[i + j * self.n]
    }

    #[inline(always)]
    fn set(&mut self, i: usize, j: usize, z: C64) {
        self.a[i + j * self.n] = z;
    }

    /// Rotates rows `k, k+1` over columns `from..n`: `[c s; -conj(s) c]`.
    #[inline]
    fn rotate_rows(&mut self, k: usize, from: usize, c: f64, s: C64) {
        let n = self.n;
        let sc = s.conj();
        for j in from..n {
            let base = j * n;
            let x = self.a[base + k];
            let y = self.a[base + k + 1];
            self.a[base + k] = x * c + s * y;
            self.a[base + k + 1] = y * c - sc * x;
        }
    }

    /// Multiplies columns `k, k+1` over rows `0..rows` by `[c -s; conj(s) c]`
    /// from the right, i.e. applies the adjoint of the row rotation.
    #[inline]
    fn rotate_cols(&mut self, k: usize, rows: usize, c: f64, s: C64) {
        let n = self.n;
        let sc = s.conj();
        let (left, right) = self.a.split_at_mut((k + 1) * n);
        let ck = &mut left[k * n..k * n + rows];
        let ck1 = &mut right[..rows];
        for (x, y) in ck.iter_mut().zip(ck1.iter_mut()) {
            let (xv, yv) = (*x, *y);
            *x = xv * c + sc * yv;
            *y = yv * c - s * xv;
        }
    }

    /// Householder reduction to upper Hessenberg form, accumulating the
    /// transformation into `q`.
    fn hessenberg(&mut self, q: &mut Work) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut v = vec![ZERO; n];
        let mut w = vec![ZERO; n];
        for k in 0..n - 2 {
            let len = n - k - 1;
            let col = &self.a[k * n + k + 1..k * n + n];
            let alpha = col[0];
            let tail: f64 = col[1..].iter().map(|z| z.norm_sqr()).sum();
            if tail == 0.0 {
                continue;
            }
            let xnorm = (alpha.norm_sqr() + tail).sqrt();
            let phase = if alpha == ZERO { ONE } else { alpha / alpha.norm() };
            let beta = -phase * xnorm;
            v[..len].copy_from_slice(col);
            v[0] -= beta;
            let vn2: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
            let scale = 2.0 / vn2;
            let v = &v[..len];

            // Left: rows k+1.., columns k+1.. (column k becomes beta e1).
            for j in (k + 1)..n {
                let c = &mut self.a[j * n + k + 1..j * n + n];
                let s: C64 = v.iter().zip(c.iter()).map(|(vi, ci)| vi.conj() * ci).sum::<C64>() * scale;
                for (ci, vi) in c.iter_mut().zip(v) {
                    *ci -= s * vi;
                }
            }
            self.a[k * n + k + 1] = beta;
            for z in &mut self.a[k * n + k + 2..k * n + n] {
                *z = ZERO;
            }

            // Right: columns k+1.. of self and q.
            for target in [&mut self.a, &mut q.a] {
                w.iter_mut().for_each(|z| *z = ZERO);
                for (t, vt) in v.iter().enumerate() {
                    let c = &target[(k + 1 + t) * n..(k + 2 + t) * n];
                    for (wi, ci) in w.iter_mut().zip(c) {
                        *wi += ci * vt;
                    }
                }
                for (t, vt) in v.iter().enumerate() {
                    let f = vt.conj() * scale;
                    let c = &mut target[(k + 1 + t) * n..(k + 2 + t) * n];
                    for (ci, wi) in c.iter_mut().zip(&w) {
                        *ci -= wi * f;
                    }
                }
            }
        }
    }

    fn negligible_subdiagonal(&self, k: usize, lo: usize, hi: usize) -> bool {
        let ulp = f64::EPSILON;
        let safmin = f64::MIN_POSITIVE;
        let smlnum = safmin * (self.n as f64 / ulp);
        let cabs1 = |z: C64| z.re.abs() + z.im.abs();
        let h = cabs1(self.at(k, k - 1));
        if h <= smlnum {
            return true;
        }
        let mut tst = cabs1(self.at(k - 1, k - 1)) + cabs1(self.at(k, k));
        if tst == 0.0 {
            if k >= lo + 2 {
                tst += cabs1(self.at(k - 1, k - 2));
            }
            if k < hi {
                tst += cabs1(self.at(k + 1, k));
            }
        }
        if h > ulp * tst {
            return false;
        }
        // Ahues & Tisseur refinement.
        let up = cabs1(self.at(k - 1, k));
        let ab = h.max(up);
        let ba = h.min(up);
        let d1 = cabs1(self.at(k, k));
        let d2 = cabs1(self.at(k - 1, k - 1) - self.at(k, k));
        let aa = d1.max(d2);
        let bb = d1.min(d2);
        let s = aa + ab;
        ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s)))
    }

    /// Single-shift QR iteration on an upper Hessenberg matrix, producing the
    /// full triangular form and accumulating into `q`.
    fn qr_iterate(&mut self, q: &mut Work) -> Result<()> {
        let n = self.n;
        if n < 2 {
            return Ok(());
        }
        const MAX_ITS: usize = 300;
        let mut hi = n - 1;
        let mut its = 0usize;
        while hi >= 1 {
            let mut lo = hi;
            while lo > 0 {
                if self.negligible_subdiagonal(lo, 0, hi) {
                    self.set(lo, lo - 1, ZERO);
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                hi -= 1;
                its = 0;
                continue;
            }
            if its >= MAX_ITS {
                return Err(Error::NoConvergence { index: hi, iterations: its });
            }
            its += 1;

            let shift = if its % 20 == 10 {
                self.at(lo, lo) + 0.75 * self.at(lo + 1, lo).re.abs()
            } else if its % 20 == 0 {
                self.at(hi, hi) + 0.75 * self.at(hi, hi - 1).re.abs()
            } else {
                wilkinson_shift(
                    self.at(hi - 1, hi - 1),
                    self.at(hi - 1, hi),
                    self.at(hi, hi - 1),
                    self.at(hi, hi),
                )
            };

            for k in lo..hi {
                let (x, y) = if k == lo {
                    (self.at(lo, lo) - shift, self.at(lo + 1, lo))
                } else {
                    (self.at(k, k - 1), self.at(k + 1, k - 1))
                };
                let (c, s, r) = givens(x, y);
                if k > lo {
                    self.set(k, k - 1, r);
                    self.set(k + 1, k - 1, ZERO);
                }
                self.rotate_rows(k, k, c, s);
                self.rotate_cols(k, (k + 3).min(hi + 1), c, s);
                q.rotate_cols(k, n, c, s);
            }
        }
        // Clear rounding residue below the diagonal.
        for j in 0..n {
            for i in (j + 1)..n {
                self.set(i, j, ZERO);
            }
        }
        Ok(())
    }

    /// Exchanges diagonal entries `k` and `k+1` of an upper triangular matrix.
    fn swap_adjacent(&mut self, q: &mut Work, k: usize) {
        let n = self.n;
        let t11 = self.at(k, k);
        let t22 = self.at(k + 1, k + 1);
        let (c, s, _) = givens(self.at(k, k + 1), t22 - t11);
        if k + 2 < n {
            self.rotate_rows(k, k + 2, c, s);
        }
        self.rotate_cols(k, k, c, s);
        self.set(k, k, t22);
        self.set(k + 1, k + 1, t11);
        q.rotate_cols(k, n, c, s);
    }

    fn apply_permutation(&mut self, q: &mut Work, target: &[usize]) {
        // at[p] = original diagonal index currently at position p
        let mut at: Vec<usize> = (0..self.n).collect();
        for (i, &want) in target.iter().enumerate() {
            let p = (i..self.n).find(|&p| at[p] == want).expect("permutation");
            for s in (i..p).rev() {
                self.swap_adjacent(q, s);
                at.swap(s, s + 1);
            }
        }
    }

    fn sort_diagonal(&mut self, q: &mut Work) -> Vec<usize> {
        let mut idx: Vec<(usize, C64)> = (0..self.n).map(|i| (i, self.at(i, i))).collect();
        idx.sort_by(|a, b| diagonal_order(*a, *b));
        let target: Vec<usize> = idx.iter().map(|x| x.0).collect();
        self.apply_permutation(q, &target);
        target
    }
}

/// Eigenvalue of the trailing 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let plus = p + disc;
    let minus = p - disc;
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom == ZERO {
        d
    } else {
        d - bc / denom
    }
}

/// `V^H U V`, handy when checking a Schur basis obtained elsewhere.
pub fn similarity(u: &CMat, v: &CMat) -> CMat {
    &adjoint_matmul(v, u) * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub(crate) fn random_matrix(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(n, n, |_, _| {
            C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        })
    }

    fn check(u: &CMat, s: &OrderedSchur) {
        assert!(s.residual(u) < 1e-10, "residual {}", s.residual(u));
        assert!(s.unitarity_defect() < 1e-12, "unitarity {}", s.unitarity_defect());
        assert!(s.is_ordered());
        assert_eq!(s.strict_lower_max(), 0.0);
    }

    #[test]
    fn diagonal_input_is_permuted() {
        let mut u = Mat::from_fn(3, 3, |_, _| ZERO);
        u[(0, 0)] = C64::new(2.0, 0.0);
        u[(1, 1)] = C64::new(0.5, 0.0);
        u[(2, 2)] = C64::new(1.0, 0.0);
        let s = ordered_schur(&u).unwrap();
        check(&u, &s);
        let ev = s.eigenvalues();
        assert_eq!(ev, vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(0.5, 0.0)]);
        // V is a permutation matrix up to phases.
        for j in 0..3 {
            let mags: Vec<f64> = (0..3).map(|i| s.v[(i, j)].norm()).collect();
            assert_eq!(mags.iter().filter(|&&m| (m - 1.0).abs() < 1e-15).count(), 1);
            assert_eq!(mags.iter().filter(|&&m| m < 1e-15).count(), 2);
        }
        assert!((s.v[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.v[(2, 1)].norm() - 1.0).abs() < 1e-15);
        assert!((s.v[(1, 2)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_matrices_decompose_in_order() {
        for seed in 0..10 {
            let u = random_matrix(8, seed);
            let s = ordered_schur(&u).unwrap();
            check(&u, &s);
        }
        let u = random_matrix(60, 99);
        check(&u, &ordered_schur(&u).unwrap());
    }

    #[test]
    fn eigenvalues_agree_with_dense_solver() {
        let u = random_matrix(12, 5);
        let s = ordered_schur(&u).unwrap();
        let mut dense = u.eigenvalues().unwrap();
        dense.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        for (a, b) in s.eigenvalues().iter().zip(&dense) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn ties_in_modulus_use_phase() {
        // Eigenvalues on the unit circle: order by -arg descending.
        let phases = [0.3, -2.0, 1.0, 3.0];
        let mut u = Mat::from_fn(4, 4, |_, _| ZERO);
        for (i, p) in phases.iter().enumerate() {
            u[(i, i)] = (I * *p).exp();
        }
        let s = ordered_schur(&u).unwrap();
        let got: Vec<f64> = s.eigenvalues().iter().map(|z| -z.arg()).collect();
        let mut want: Vec<f64> = phases.iter().map(|p| -p).collect();
        want.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn handles_tiny_and_trivial_sizes() {
        let one = Mat::from_fn(1, 1, |_, _| C64::new(3.0, -1.0));
        let s = ordered_schur(&one).unwrap();
        assert_eq!(s.eigenvalues(), vec![C64::new(3.0, -1.0)]);
        let nil = Mat::from_fn(4, 4, |i, j| if j == i + 1 { ONE } else { ZERO });
        let s = ordered_schur(&nil).unwrap();
        assert!(s.residual(&nil) < 1e-12);
    }

    #[test]
    fn reorder_rejects_non_permutations() {
        let u = random_matrix(3, 1);
        let (v, t) = schur(&u).unwrap();
        assert!(reorder_schur(&v, &t, &[0, 0, 1]).is_err());
        let (v2, t2) = reorder_schur(&v, &t, &[2, 0, 1]).unwrap();
        assert!((t2[(0, 0)] - t[(2, 2)]).norm() == 0.0);
        let lhs = &u * &v2;
        let rhs = &v2 * &t2;
        assert!(frobenius(&(&lhs - &rhs)) / frobenius(&u) < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn diagonal_similarity_keeps_the_spectrum(seed in 0u64..1000, n in 2usize..9) {
            let u = random_matrix(n, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
            let d: Vec<C64> = (0..n).map(|_| (I * rng.random_range(0.0..6.0)).exp()).collect();
            let ud = Mat::from_fn(n, n, |i, j| d[i] * u[(i, j)] * d[j].conj());
            let a = ordered_schur(&u).unwrap();
            let b = ordered_schur(&ud).unwrap();
            for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
                prop_assert!((x - y).norm() < 1e-10);
            }
        }
    }
}
