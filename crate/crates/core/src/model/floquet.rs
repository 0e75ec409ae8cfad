use std::f64::consts::PI;
use std::io::{Read, Write};

use faer::Mat;
use rustfft::FftPlanner;

use super::params::{RotorParams, Variant};
use crate::io::{read_grid, write_grid, GridData, GridHeader};
use crate::linalg::{CMat, C64, ZERO};
use crate::{Error, Result};

/// One-period evolution operator in the position basis `q_l = l / N`,
/// `l = 0..N`, together with the parameters it was built from.
#[derive(Clone, Debug)]
pub struct FloquetOperator {
    pub matrix: CMat,
    pub params: RotorParams,
}

/// How the momentum sum in the matrix elements is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BuildRoute {
    /// The momentum sum depends on `l - l'` only; it is evaluated once with an
    /// FFT and the circulant is scattered into the matrix.
    #[default]
    Factorized,
    /// Literal `O(N^3)` evaluation of every matrix element.
    Direct,
}

pub fn build_pt_floquet(params: &RotorParams) -> Result<FloquetOperator> {
    if params.variant != Variant::Pt {
        return Err(Error::InvalidParameter("expected the PT variant".into()));
    }
    build_floquet_with(params, BuildRoute::Factorized)
}

pub fn build_escape_floquet(params: &RotorParams) -> Result<FloquetOperator> {
    if !matches!(params.variant, Variant::Escape { .. }) {
        return Err(Error::InvalidParameter("expected the escape variant".into()));
    }
    build_floquet_with(params, BuildRoute::Factorized)
}

pub fn build_floquet(params: &RotorParams) -> Result<FloquetOperator> {
    build_floquet_with(params, BuildRoute::Factorized)
}

pub fn build_floquet_with(params: &RotorParams, route: BuildRoute) -> Result<FloquetOperator> {
    params.validate()?;
    let n = params.n;
    let n1 = params.n1() as i64;
    if params.variant == Variant::Pt && params.gamma * n1 as f64 > 25.0 {
        log::warn!(
            "gamma * N1 = {:.3} > 25: exp(gamma m) exceeds 1e10 and the spectrum is likely unstable",
            params.gamma * n1 as f64
        );
    }

    // Momentum-diagonal factor d_m = exp(-i pi m^2 / N + gamma m) (PT) or the
    // free factor alone (escape).
    let gain = match params.variant {
        Variant::Pt => params.gamma,
        Variant::Escape { .. } => 0.0,
    };
    let momentum_factor = |m: i64| {
        let mf = m as f64;
        C64::from_polar((gain * mf).exp(), -PI * mf * mf / n as f64)
    };

    // Position-diagonal factor: the kick, times the strip damping for escape.
    let damping = (-params.gamma * n as f64 / (8.0 * PI * PI)).exp();
    let position_factor: Vec<C64> = (0..n)
        .map(|l| {
            let q = l as f64 / n as f64;
            let kick =
                C64::from_polar(1.0, -(n as f64) * params.k / (2.0 * PI) * (2.0 * PI * q).cos());
            if params.in_loss_region(q) {
                kick * damping
            } else {
                kick
            }
        })
        .collect();

    let matrix = match route {
        BuildRoute::Factorized => {
            // c(j) = (1/N) sum_m d_m exp(2 pi i m j / N), an unnormalised inverse DFT.
            let mut c = vec![ZERO; n];
            for m in -n1..=n1 {
                c[m.rem_euclid(n as i64) as usize] = momentum_factor(m);
            }
            FftPlanner::new().plan_fft_inverse(n).process(&mut c);
            let inv_n = 1.0 / n as f64;
            Mat::from_fn(n, n, |l, lp| {
                let j = (l + n - lp) % n;
                position_factor[l] * c[j] * inv_n
            })
        }
        BuildRoute::Direct => {
            let d: Vec<C64> = (-n1..=n1).map(momentum_factor).collect();
            Mat::from_fn(n, n, |l, lp| {
                let diff = l as f64 - lp as f64;
                let sum: C64 = (-n1..=n1)
                    .zip(&d)
                    .map(|(m, dm)| dm * C64::from_polar(1.0, 2.0 * PI * m as f64 * diff / n as f64))
                    .sum();
                position_factor[l] * sum / n as f64
            })
        }
    };

    Ok(FloquetOperator { matrix, params: *params })
}

impl FloquetOperator {
    pub fn dim(&self) -> usize {
        self.params.n
    }

    pub fn hbar(&self) -> f64 {
        self.params.hbar()
    }

    /// Writes the operator in the binary grid format; `load` reads it back
    /// bit-exactly.
    pub fn save<W: Write>(&self, w: W) -> Result<()> {
        let n = self.params.n;
        let mut header = GridHeader::new(n, n);
        header.push("variant", self.params.variant.name());
        header.push("k", format!("{:?}", self.params.k));
        header.push("gamma", format!("{:?}", self.params.gamma));
        header.push("n", n.to_string());
        if let Variant::Escape { q_left, q_right } = self.params.variant {
            header.push("q_left", format!("{q_left:?}"));
            header.push("q_right", format!("{q_right:?}"));
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.matrix[(i, j)]);
            }
        }
        write_grid(w, &header, &GridData::Complex(data))
    }

    pub fn load<R: Read>(r: R) -> Result<Self> {
        let (header, data) = read_grid(r)?;
        let GridData::Complex(values) = data else {
            return Err(Error::Format("operator file must hold complex data".into()));
        };
        if header.rows != header.cols {
            return Err(Error::Format("operator must be square".into()));
        }
        let parse = |key: &str| -> Result<f64> {
            header
                .get(key)
                .ok_or_else(|| Error::Format(format!("missing key {key}")))?
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad value for {key}: {e}")))
        };
        let n = header.rows;
        let variant = match header.get("variant") {
            Some("pt") => Variant::Pt,
            Some("escape") => Variant::Escape { q_left: parse("q_left")?, q_right: parse("q_right")? },
            other => return Err(Error::Format(format!("unknown variant {other:?}"))),
        };
        let params = RotorParams { k: parse("k")?, gamma: parse("gamma")?, n, variant };
        params.validate()?;
        let matrix = Mat::from_fn(n, n, |i, j| values[i * n + j]);
        Ok(Self { matrix, params })
    }
}
