use faer::Mat;

use crate::linalg::{expm, CMat, C64, I, ZERO};
use crate::{Error, Result};

/// Parameters of `K = Jx + i gamma Jz` in a `dim`-dimensional irreducible
/// representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Params {
    pub dim: usize,
    pub gamma: f64,
}

impl Su2Params {
    pub fn new(dim: usize, gamma: f64) -> Result<Self> {
        let p = Self { dim, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "representation dimension must be >= 2, got {}",
                self.dim
            )));
        }
        if !self.gamma.is_finite() || self.gamma.abs() <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "the analytic case needs |gamma| > 1, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// `sqrt(gamma^2 - 1)`.
    pub fn lambda(&self) -> f64 {
        (self.gamma * self.gamma - 1.0).sqrt()
    }

    pub fn spin(&self) -> f64 {
        (self.dim as f64 - 1.0) / 2.0
    }

    /// Magnetic quantum numbers in basis order: `j, j-1, ..., -j`.
    pub fn m_values(&self) -> Vec<f64> {
        let j = self.spin();
        (0..self.dim).map(|a| j - a as f64).collect()
    }

    /// `i m lambda` in basis order (decreasing imaginary part).
    pub fn analytic_eigenvalues(&self) -> Vec<C64> {
        let lambda = self.lambda();
        self.m_values().into_iter().map(|m| C64::new(0.0, m * lambda)).collect()
    }

    /// Rotation angle of the triangularising transformation: `tan(phi) = 1/lambda`,
    /// with `cos(phi) = lambda/gamma` and `sin(phi) = 1/gamma`.
    pub fn schur_angle(&self) -> f64 {
        (1.0 / self.gamma).atan2(self.lambda() / self.gamma)
    }
}

/// `(Jx, Jy, Jz)` in the `Jz` eigenbasis ordered `m = j, j-1, ..., -j`.
pub fn angular_momentum(dim: usize) -> (CMat, CMat, CMat) {
    let j = (dim as f64 - 1.0) / 2.0;
    let m = |a: usize| j - a as f64;
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; |m+1> sits one index earlier.
    let jplus = Mat::from_fn(dim, dim, |r, c| {
        if c >= 1 && r == c - 1 {
            let mc = m(c);
            C64::new((j * (j + 1.0) - mc * (mc + 1.0)).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let jx = Mat::from_fn(dim, dim, |r, c| (jplus[(r, c)] + jplus[(c, r)].conj()) * 0.5);
    let jy = Mat::from_fn(dim, dim, |r, c| (jplus[(r, c)] - jplus[(c, r)].conj()) / (2.0 * I));
    let jz = Mat::from_fn(dim, dim, |r, c| if r == c { C64::new(m(r), 0.0) } else { ZERO });
    (jx, jy, jz)
}

pub fn build_su2_hamiltonian(params: &Su2Params) -> Result<CMat> {
    params.validate()?;
    let (jx, _, jz) = angular_momentum(params.dim);
    Ok(Mat::from_fn(params.dim, params.dim, |r, c| jx[(r, c)] + I * params.gamma * jz[(r, c)]))
}

/// Analytic Schur basis `exp(-i phi Jx) |m>`, columns ordered by decreasing `m`.
pub fn su2_schur_reference(params: &Su2Params) -> Result<CMat> {
    params.validate()?;
    let (jx, _, _) = angular_momentum(params.dim);
    let phi = params.schur_angle();
    Ok(expm(&Mat::from_fn(params.dim, params.dim, |r, c| -I * phi * jx[(r, c)])))
}

/// Non-unitary propagator `exp(-i K tau)`.
pub fn su2_propagator(params: &Su2Params, tau: f64) -> Result<CMat> {
    let k = build_su2_hamiltonian(params)?;
    Ok(expm(&Mat::from_fn(params.dim, params.dim, |r, c| -I * tau * k[(r, c)])))
}
