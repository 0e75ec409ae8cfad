use std::f64::consts::PI;
use std::io::Write;

use crate::io::fmt17;
use crate::linalg::C64;
use crate::model::FloquetOperator;
use crate::{Error, Result};

use super::schur::ordered_schur;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateClass {
    Gain,
    Stable,
    Loss,
}

impl StateClass {
    pub fn name(self) -> &'static str {
        match self {
            StateClass::Gain => "gain",
            StateClass::Stable => "stable",
            StateClass::Loss => "loss",
        }
    }
}

/// `Re(eps)/hbar` for `lambda = exp(-i eps / hbar)`, in `(-pi, pi]`.
pub fn phase_quasienergy(lambda: C64) -> f64 {
    let t = -lambda.arg();
    if t <= -PI {
        PI
    } else {
        t
    }
}

/// Quasienergies `eps_n = Re eps_n + i mu_n` of a set of Floquet eigenvalues,
/// kept in the order they were given (Schur order when built by
/// [`quasienergies`]).
#[derive(Clone, Debug)]
pub struct QuasiEnergySet {
    pub eigenvalues: Vec<C64>,
    pub epsilon: Vec<C64>,
    pub mu: Vec<f64>,
    pub class: Vec<StateClass>,
    pub tol_mu: f64,
    pub hbar: f64,
}

/// Index sets into a [`QuasiEnergySet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionSets {
    pub gain: Vec<usize>,
    pub stable: Vec<usize>,
    pub loss: Vec<usize>,
}

impl QuasiEnergySet {
    /// Default classification tolerance `1e3 * eps * max(max|ln|lambda||, 1) * hbar`.
    /// The floor covers the unitary limit, where rounding in `|lambda|` is
    /// of order eps rather than relative to `ln|lambda|`.
    pub fn default_tol(eigenvalues: &[C64], hbar: f64) -> f64 {
        let max_log = eigenvalues
            .iter()
            .map(|z| z.norm().ln().abs())
            .filter(|x| x.is_finite())
            .fold(1.0, f64::max);
        1e3 * f64::EPSILON * max_log * hbar
    }

    pub fn from_eigenvalues(eigenvalues: Vec<C64>, hbar: f64, tol_mu: Option<f64>) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        let tol_mu = match tol_mu {
            Some(t) if t >= 0.0 && t.is_finite() => t,
            Some(t) => return Err(Error::InvalidParameter(format!("tol_mu must be >= 0, got {t}"))),
            None => Self::default_tol(&eigenvalues, hbar),
        };
        let mu: Vec<f64> = eigenvalues
            .iter()
            .map(|z| {
                let m = z.norm();
                if m == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    hbar * m.ln()
                }
            })
            .collect();
        let epsilon = eigenvalues
            .iter()
            .zip(&mu)
            .map(|(z, &m)| C64::new(hbar * phase_quasienergy(*z), m))
            .collect();
        let class = mu
            .iter()
            .map(|&m| {
                if m > tol_mu {
                    StateClass::Gain
                } else if m < -tol_mu {
                    StateClass::Loss
                } else {
                    StateClass::Stable
                }
            })
            .collect();
        Ok(Self { eigenvalues, epsilon, mu, class, tol_mu, hbar })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `(gain, stable, loss)` counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let count = |c| self.class.iter().filter(|&&x| x == c).count();
        (count(StateClass::Gain), count(StateClass::Stable), count(StateClass::Loss))
    }

    /// `(f+, f0, f-)`. The stable fraction is `1 - f+ - f-`, so the three add
    /// up to one.
    pub fn fractions(&self) -> (f64, f64, f64) {
        let (g, _, l) = self.counts();
        let n = self.len() as f64;
        let fp = g as f64 / n;
        let fm = l as f64 / n;
        (fp, 1.0 - fp - fm, fm)
    }

    /// Writes `index,re_epsilon,mu,class`.
    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,re_epsilon,mu,class")?;
        for i in 0..self.len() {
            writeln!(w, "{},{},{},{}", i, fmt17(self.epsilon[i].re), fmt17(self.mu[i]), self.class[i].name())?;
        }
        Ok(())
    }
}

/// Quasienergies of a Floquet operator in Schur order.
pub fn quasienergies(op: &FloquetOperator) -> Result<QuasiEnergySet> {
    let schur = ordered_schur(&op.matrix)?;
    QuasiEnergySet::from_eigenvalues(schur.eigenvalues(), op.hbar(), None)
}

pub fn schur_fraction_sets(q: &QuasiEnergySet) -> FractionSets {
    let pick = |c| (0..q.len()).filter(|&i| q.class[i] == c).collect();
    FractionSets { gain: pick(StateClass::Gain), stable: pick(StateClass::Stable), loss: pick(StateClass::Loss) }
}

/// The first `n` indices of the Schur ordering.
pub fn top_n_set(q: &QuasiEnergySet, n: usize) -> Result<Vec<usize>> {
    if n > q.len() {
        return Err(Error::InvalidParameter(format!("top-n set with n = {n} > N = {}", q.len())));
    }
    Ok((0..n).collect())
}
