use std::f64::consts::PI;

use crate::{Error, Result};

/// Which kicked rotor the parameters describe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    /// PT-symmetric rotor with momentum-proportional gain/loss.
    Pt,
    /// Closed rotor with a loss strip `q_left < q < q_right`.
    Escape { q_left: f64, q_right: f64 },
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Pt => "pt",
            Variant::Escape { .. } => "escape",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotorParams {
    /// Kicking strength.
    pub k: f64,
    /// Non-Hermiticity strength, `>= 0`.
    pub gamma: f64,
    /// Hilbert-space dimension, odd.
    pub n: usize,
    pub variant: Variant,
}

impl RotorParams {
    pub fn pt(n: usize, k: f64, gamma: f64) -> Result<Self> {
        let p = Self { k, gamma, n, variant: Variant::Pt };
        p.validate()?;
        Ok(p)
    }

    pub fn escape(n: usize, k: f64, gamma: f64, q_left: f64, q_right: f64) -> Result<Self> {
        let p = Self { k, gamma, n, variant: Variant::Escape { q_left, q_right } };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 || self.n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "dimension N must be odd and >= 3, got {}",
                self.n
            )));
        }
        if !self.k.is_finite() {
            return Err(Error::InvalidParameter(format!("k must be finite, got {}", self.k)));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and non-negative, got {}",
                self.gamma
            )));
        }
        if let Variant::Escape { q_left, q_right } = self.variant {
            let ok = q_left.is_finite()
                && q_right.is_finite()
                && (0.0..=1.0).contains(&q_left)
                && (0.0..=1.0).contains(&q_right)
                && q_left < q_right;
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "loss strip needs 0 <= q_left < q_right <= 1, got ({q_left}, {q_right})"
                )));
            }
        }
        Ok(())
    }

    /// `N1 = (N - 1) / 2`.
    pub fn n1(&self) -> usize {
        (self.n - 1) / 2
    }

    /// Effective Planck constant `1 / (2 pi N)`.
    pub fn hbar(&self) -> f64 {
        1.0 / (2.0 * PI * self.n as f64)
    }

    /// Planck cell area `2 pi hbar = 1 / N`.
    pub fn planck_cell(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Characteristic function of the loss strip (open interval). Always false for
    /// the PT variant.
    pub fn in_loss_region(&self, q: f64) -> bool {
        match self.variant {
            Variant::Pt => false,
            Variant::Escape { q_left, q_right } => q > q_left && q < q_right,
        }
    }
}
