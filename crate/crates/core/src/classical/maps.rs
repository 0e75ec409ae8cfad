use std::f64::consts::PI;

use crate::model::{RotorParams, Variant};
use crate::{Error, Result};

/// Point of the backward map with its classical norm, kept as `ln w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapState {
    pub q: f64,
    pub p: f64,
    pub ln_w: f64,
}

impl MapState {
    /// State with `w = 1`, reduced to the fundamental domain.
    pub fn new(q: f64, p: f64) -> Self {
        Self { q: wrap_unit(q), p: wrap_centered(p), ln_w: 0.0 }
    }

    pub fn w(&self) -> f64 {
        self.ln_w.exp()
    }
}

/// `x mod 1` in `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1 for tiny negative inputs.
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `mod(x + 1/2, 1) - 1/2` in `[-1/2, 1/2)`.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    wrap_unit(x + 0.5) - 0.5
}

/// PT-symmetric rotor, one step of the backward map.
#[inline]
pub fn step_pt(s: MapState, k: f64, gamma: f64) -> MapState {
    let shift = gamma / (2.0 * PI);
    let p = wrap_unit(s.p - k / (2.0 * PI) * (2.0 * PI * s.q).sin() + shift + 0.5) - 0.5;
    let q = wrap_unit(s.q - p + shift);
    MapState { q, p, ln_w: s.ln_w + 2.0 * gamma * p }
}

/// Rotor with partial escape; the loss uses the position before the step.
#[inline]
pub fn step_escape(s: MapState, k: f64, gamma: f64, q_left: f64, q_right: f64) -> MapState {
    let p = wrap_unit(s.p - k / (2.0 * PI) * (2.0 * PI * s.q).sin() + 0.5) - 0.5;
    let q = wrap_unit(s.q - p);
    let loss = if s.q > q_left && s.q < q_right { 2.0 * gamma } else { 0.0 };
    MapState { q, p, ln_w: s.ln_w - loss }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassicalMap {
    Pt { k: f64, gamma: f64 },
    Escape { k: f64, gamma: f64, q_left: f64, q_right: f64 },
}

impl ClassicalMap {
    pub fn from_params(p: &RotorParams) -> Self {
        match p.variant {
            Variant::Pt => ClassicalMap::Pt { k: p.k, gamma: p.gamma },
            Variant::Escape { q_left, q_right } => ClassicalMap::Escape { k: p.k, gamma: p.gamma, q_left, q_right },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (k, gamma) = (self.k(), self.gamma());
        if !k.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParameter("map parameters must be finite".into()));
        }
        if let ClassicalMap::Escape { q_left, q_right, .. } = *self {
            if !(0.0..=1.0).contains(&q_left) || !(0.0..=1.0).contains(&q_right) || q_left >= q_right {
                return Err(Error::InvalidParameter(format!("loss strip ({q_left}, {q_right}) is empty or out of range")));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        match *self {
            ClassicalMap::Pt { k, .. } | ClassicalMap::Escape { k, .. } => k,
        }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            ClassicalMap::Pt { gamma, .. } | ClassicalMap::Escape { gamma, .. } => gamma,
        }
    }

    #[inline]
    pub fn step(&self, s: MapState) -> MapState {
        match *self {
            ClassicalMap::Pt { k, gamma } => step_pt(s, k, gamma),
            ClassicalMap::Escape { k, gamma, q_left, q_right } => step_escape(s, k, gamma, q_left, q_right),
        }
    }

    pub fn in_loss_region(&self, q: f64) -> bool {
        match *self {
            ClassicalMap::Pt { .. } => false,
            ClassicalMap::Escape { q_left, q_right, .. } => q > q_left && q < q_right,
        }
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("map".to_string(), match self { ClassicalMap::Pt { .. } => "pt", ClassicalMap::Escape { .. } => "escape" }.to_string()),
            ("k".to_string(), format!("{:?}", self.k())),
            ("gamma".to_string(), format!("{:?}", self.gamma())),
        ];
        if let ClassicalMap::Escape { q_left, q_right, .. } = *self {
            out.push(("q_left".into(), format!("{q_left:?}")));
            out.push(("q_right".into(), format!("{q_right:?}")));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionPoint {
    pub q: f64,
    pub p: f64,
    pub in_loss_region: bool,
}

/// Iterates `steps` times from every seed and collects the iterates
/// (seeds themselves excluded), seed by seed.
pub fn poincare_section(map: &ClassicalMap, seeds: &[(f64, f64)], steps: usize) -> Result<Vec<SectionPoint>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    map.validate()?;
    let mut out = Vec::with_capacity(seeds.len() * steps);
    for &(q, p) in seeds {
        let mut s = MapState::new(q, p);
        for _ in 0..steps {
            s = map.step(s);
            out.push(SectionPoint { q: s.q, p: s.p, in_loss_region: map.in_loss_region(s.q) });
        }
    }
    Ok(out)
}
