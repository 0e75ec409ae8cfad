use std::f64::consts::PI;

use crate::linalg::{C64, ZERO};
use crate::{Error, Result};

/// Terms of the image sum below `exp(-CUTOFF)` relative to the peak are
/// dropped when evaluating Husimi distributions.
const CUTOFF: f64 = 40.0;

/// Torus coherent states
///
/// ```text
/// <q_l|z(q0,p0)> ~ sum_{s=-s_max}^{s_max} exp(-(x - q0)^2 / (2 hbar) + i p0 (x - q0) / hbar),
/// x = l/N + s,
/// ```
///
/// normalised to one. At `p0 = 0` all components are real and positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentFactory {
    pub n: usize,
    pub hbar: f64,
    pub s_max: usize,
}

/// Sites of a truncated coherent state centred at `q0`.
#[derive(Clone, Debug)]
pub(crate) struct Window {
    /// Distinct position indices.
    pub sites: Vec<usize>,
    /// `(slot in sites, x - q0)` for every retained image term.
    pub terms: Vec<(usize, f64)>,
}

impl CoherentFactory {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_images(n, 3)
    }

    pub fn with_images(n: usize, s_max: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { n, hbar: 1.0 / (2.0 * PI * n as f64), s_max })
    }

    /// Full image sum over every site.
    pub fn state(&self, q0: f64, p0: f64) -> Vec<C64> {
        let nf = self.n as f64;
        let s_max = self.s_max as i64;
        let mut z: Vec<C64> = (0..self.n)
            .map(|l| {
                (-s_max..=s_max)
                    .map(|s| self.term(l as f64 / nf + s as f64 - q0, p0))
                    .sum()
            })
            .collect();
        normalize(&mut z);
        z
    }

    #[inline]
    pub(crate) fn term(&self, d: f64, p0: f64) -> C64 {
        C64::from_polar((-d * d / (2.0 * self.hbar)).exp(), p0 * d / self.hbar)
    }

    /// Positions contributing more than `exp(-CUTOFF)` to the state at `q0`.
    pub(crate) fn window(&self, q0: f64) -> Window {
        let n = self.n as i64;
        let nf = self.n as f64;
        let reach = (2.0 * CUTOFF * self.hbar).sqrt();
        let s_max = self.s_max as i64;
        let lo = (((q0 - reach) * nf).ceil() as i64).max(-s_max * n);
        let hi = (((q0 + reach) * nf).floor() as i64).min((s_max + 1) * n - 1);
        let mut slot_of = vec![usize::MAX; self.n];
        let mut sites = Vec::new();
        let mut terms = Vec::new();
        for l in lo..=hi {
            let site = l.rem_euclid(n) as usize;
            if slot_of[site] == usize::MAX {
                slot_of[site] = sites.len();
                sites.push(site);
            }
            terms.push((slot_of[site], l as f64 / nf - q0));
        }
        Window { sites, terms }
    }

    /// Truncated state on its window, normalised; entries line up with
    /// `window.sites`.
    pub(crate) fn windowed(&self, window: &Window, p0: f64, out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = ZERO);
        for &(slot, d) in &window.terms {
            out[slot] += self.term(d, p0);
        }
        normalize(out);
    }
}

fn normalize(z: &mut [C64]) {
    let nrm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    z.iter_mut().for_each(|c| *c /= nrm);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn states_are_normalised() {
        let f = CoherentFactory::new(101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let z = f.state(rng.random_range(0.0..1.0), rng.random_range(-0.5..0.5));
            let n: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn real_positive_envelope_at_zero_momentum() {
        let f = CoherentFactory::new(51).unwrap();
        let z = f.state(0.3, 0.0);
        assert!(z.iter().all(|c| c.im == 0.0 && c.re >= 0.0));
    }

    #[test]
    fn gaussian_overlap_law() {
        let f = CoherentFactory::new(1001).unwrap();
        let sigma = (f.hbar / 2.0).sqrt();
        let (q0, p0) = (0.4, 0.1);
        let a = f.state(q0, p0);
        for k in 1..=6 {
            let delta = 0.5 * k as f64 * sigma;
            let b = f.state(q0 + delta, p0);
            let got = dot(&a, &b).norm_sqr();
            let want = (-delta * delta / (2.0 * f.hbar)).exp();
            assert!((got / want - 1.0).abs() < 0.02, "delta={delta}: {got} vs {want}");
        }
    }

    #[test]
    fn three_images_suffice() {
        for n in [101usize, 301] {
            let a = CoherentFactory::with_images(n, 3).unwrap();
            let b = CoherentFactory::with_images(n, 6).unwrap();
            for (q0, p0) in [(0.0, 0.2), (0.99, -0.45), (0.5, 0.0)] {
                let (za, zb) = (a.state(q0, p0), b.state(q0, p0));
                let d = za.iter().zip(&zb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(d < 1e-12);
            }
        }
    }

    #[test]
    fn window_matches_full_state() {
        for n in [5usize, 51, 1001] {
            let f = CoherentFactory::new(n).unwrap();
            for (q0, p0) in [(0.02, 0.3), (0.7, -0.2)] {
                let full = f.state(q0, p0);
                let w = f.window(q0);
                let mut part = vec![ZERO; w.sites.len()];
                f.windowed(&w, p0, &mut part);
                let mut dense = vec![ZERO; n];
                for (slot, &site) in w.sites.iter().enumerate() {
                    dense[site] = part[slot];
                }
                let d = dense.iter().zip(&full).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                assert!(d < 1e-12, "n={n}: {d}");
            }
        }
    }
}
