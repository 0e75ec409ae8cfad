//! Frozen-Gaussian dynamics of `K = H + i Gamma`:
//!
//! ```text
//! dq/dt = -dH/dp + dGamma/dq
//! dp/dt =  dH/dq + dGamma/dp
//! dw/dt = 2 Gamma w
//! ```
//!
//! The norm is integrated as `ln w`.

use crate::{Error, Result};

/// A phase-space function returning `(f, df/dq, df/dp)`.
pub type PhaseFn = Box<dyn Fn(f64, f64) -> (f64, f64, f64) + Send + Sync>;

pub struct FlowSpec {
    pub h: PhaseFn,
    pub gamma: PhaseFn,
    pub dt: f64,
}

impl FlowSpec {
    pub fn new(h: PhaseFn, gamma: PhaseFn, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { h, gamma, dt })
    }

    /// Purely Hamiltonian flow (`Gamma = 0`).
    pub fn hamiltonian(h: PhaseFn, dt: f64) -> Result<Self> {
        Self::new(h, Box::new(|_, _| (0.0, 0.0, 0.0)), dt)
    }

    fn rhs(&self, q: f64, p: f64) -> [f64; 3] {
        let (_, hq, hp) = (self.h)(q, p);
        let (g, gq, gp) = (self.gamma)(q, p);
        [-hp + gq, hq + gp, 2.0 * g]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowPoint {
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub ln_w: f64,
}

impl FlowPoint {
    pub fn w(&self) -> f64 {
        self.ln_w.exp()
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<FlowPoint>,
    /// Time at which a non-finite derivative stopped the integration; the
    /// last point is then the last valid state.
    pub aborted_at: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> FlowPoint {
        *self.points.last().expect("trajectory holds the initial point")
    }
}

/// Classical RK4 from `(q0, p0)` with `w = 1` up to `t_end`. The step is
/// shrunk uniformly so that `t_end` is hit exactly.
pub fn integrate_frozen_gaussian(flow: &FlowSpec, z0: (f64, f64), t_end: f64) -> Result<Trajectory> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end must be >= 0, got {t_end}")));
    }
    let steps = ((t_end / flow.dt) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let mut points = Vec::with_capacity(steps + 1);
    let mut y = [z0.0, z0.1, 0.0];
    points.push(FlowPoint { t: 0.0, q: y[0], p: y[1], ln_w: 0.0 });
    let add = |y: &[f64; 3], k: &[f64; 3], s: f64| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];
    for i in 0..steps {
        let k1 = flow.rhs(y[0], y[1]);
        let y2 = add(&y, &k1, 0.5 * h);
        let k2 = flow.rhs(y2[0], y2[1]);
        let y3 = add(&y, &k2, 0.5 * h);
        let k3 = flow.rhs(y3[0], y3[1]);
        let y4 = add(&y, &k3, h);
        let k4 = flow.rhs(y4[0], y4[1]);
        let next: [f64; 3] = std::array::from_fn(|c| y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]));
        let t = (i + 1) as f64 * h;
        if next.iter().chain(&k1).chain(&k2).chain(&k3).chain(&k4).any(|v| !v.is_finite()) {
            log::warn!("non-finite derivative at t = {t}; integration stopped");
            return Ok(Trajectory { points, aborted_at: Some(t) });
        }
        y = next;
        points.push(FlowPoint { t, q: y[0], p: y[1], ln_w: y[2] });
    }
    Ok(Trajectory { points, aborted_at: None })
}
