//! Dense complex matrix helpers shared by the operator builders and the
//! spectral routines. Matrices are `faer` column-major matrices of `Complex64`.

use faer::Mat;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = Mat<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

/// Matrix with i.i.d. standard complex Gaussian entries (real and imaginary
/// parts each N(0, 1)), drawn from ChaCha8 seeded with `seed`.
pub fn random_gaussian_matrix(n: usize, seed: u64) -> CMat {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Mat::from_fn(n, n, |_, _| {
        C64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    })
}

pub fn adjoint(a: &CMat) -> CMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a * b
}

/// `a^H b` without materialising the adjoint.
pub fn adjoint_matmul(a: &CMat, b: &CMat) -> CMat {
    a.adjoint() * b
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm_l2()
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for z in a.col_as_slice(j) {
            m = m.max(z.norm());
        }
    }
    m
}

/// `max |A^H A - I|`, entrywise.
pub fn unitarity_defect(a: &CMat) -> f64 {
    let g = adjoint_matmul(a, a);
    let n = g.nrows();
    let mut m = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { ONE } else { ZERO };
            m = m.max((g[(i, j)] - target).norm());
        }
    }
    m
}

/// `max |A A^H - I|`, entrywise.
pub fn co_unitarity_defect(a: &CMat) -> f64 {
    let g = a * a.adjoint();
    let n = g.nrows();
    let mut m = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { ONE } else { ZERO };
            m = m.max((g[(i, j)] - target).norm());
        }
    }
    m
}

/// Largest modulus of the strictly lower triangle.
pub fn strict_lower_max(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in (j + 1)..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn column(a: &CMat, j: usize) -> Vec<C64> {
    a.col_as_slice(j).to_vec()
}

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matvec(a: &CMat, x: &[C64]) -> Vec<C64> {
    let mut y = vec![ZERO; a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == ZERO {
            continue;
        }
        for (yi, aij) in y.iter_mut().zip(a.col_as_slice(j)) {
            *yi += aij * xj;
        }
    }
    y
}

/// Complex Givens rotation: returns `(c, s, r)` with real `c` such that
/// `[c s; -conj(s) c] [f; g] = [r; 0]`.
#[inline]
pub fn givens(f: C64, g: C64) -> (f64, C64, C64) {
    if g == ZERO {
        return (1.0, ZERO, f);
    }
    let fa = f.norm();
    let ga = g.norm();
    if fa == 0.0 {
        return (0.0, g.conj() / ga, C64::new(ga, 0.0));
    }
    let nrm = fa.hypot(ga);
    let phase = f / fa;
    let c = fa / nrm;
    let s = phase * g.conj() / nrm;
    (c, s, phase * nrm)
}

/// Matrix exponential by scaling and squaring with a Taylor kernel. Intended for
/// the small dense matrices of the SU(2) model and of the tests.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm1 = (0..n)
        .map(|j| a.col_as_slice(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    if norm1 > 0.25 {
        squarings = (norm1 / 0.25).log2().ceil() as u32;
    }
    let scale = 0.5f64.powi(squarings as i32);
    let scaled = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=24 {
        term = &term * &scaled;
        let inv = 1.0 / k as f64;
        for j in 0..n {
            for i in 0..n {
                term[(i, j)] *= inv;
                result[(i, j)] += term[(i, j)];
            }
        }
        if max_abs(&term) < 1e-18 * max_abs(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending, eigenvectors
/// as columns.
pub fn hermitian_eigen(a: &CMat) -> crate::Result<(Vec<f64>, CMat)> {
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| crate::Error::Numerical(format!("Hermitian eigensolver: {e:?}")))?;
    let values = (0..a.nrows()).map(|i| evd.S()[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn singular_values(a: &CMat) -> crate::Result<Vec<f64>> {
    a.singular_values()
        .map_err(|e| crate::Error::Numerical(format!("SVD: {e:?}")))
}

/// Inverse through an LU factorisation with partial pivoting.
pub fn inverse(a: &CMat) -> CMat {
    use faer::linalg::solvers::DenseSolveCore;
    a.partial_piv_lu().inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_zeroes_second_component() {
        let f = C64::new(0.3, -1.2);
        let g = C64::new(-0.7, 0.4);
        let (c, s, r) = givens(f, g);
        let top = f * c + s * g;
        let bottom = -s.conj() * f + g * c;
        assert!((top - r).norm() < 1e-15);
        assert!(bottom.norm() < 1e-15);
        assert!((c * c + s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let mut a = Mat::from_fn(2, 2, |_, _| ZERO);
        a[(0, 0)] = C64::new(1.0, 2.0);
        a[(1, 1)] = C64::new(-0.5, 0.0);
        let e = expm(&a);
        assert!((e[(0, 0)] - a[(0, 0)].exp()).norm() < 1e-13);
        assert!((e[(1, 1)] - a[(1, 1)].exp()).norm() < 1e-14);

        let mut n = Mat::from_fn(2, 2, |_, _| ZERO);
        n[(0, 1)] = C64::new(3.0, 0.0);
        let e = expm(&n);
        assert!((e[(0, 1)] - C64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((e[(0, 0)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn expm_of_skew_hermitian_is_unitary() {
        let h = Mat::from_fn(5, 5, |i, j| {
            let x = ((i * 7 + j * 3) % 5) as f64 - 2.0;
            let y = ((i * 2 + j * 5) % 3) as f64 - 1.0;
            C64::new(x + if i == j { 1.0 } else { 0.0 }, y)
        });
        let herm = Mat::from_fn(5, 5, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
        let u = expm(&Mat::from_fn(5, 5, |i, j| -I * herm[(i, j)] * 3.0));
        assert!(unitarity_defect(&u) < 1e-12);
    }
}
