use std::f64::consts::PI;

use super::SupportSet;
use crate::phasespace::Field;

/// Kernel weights below this fraction of the peak are dropped.
const KERNEL_CUTOFF: f64 = 1e-18;

/// Minimum-uncertainty width `sqrt(hbar / 2)` for dimension `n`.
pub fn smoothing_sigma(n: usize) -> f64 {
    (1.0 / (4.0 * PI * n as f64)).sqrt()
}

/// Indicator of `set` convolved with a periodic Gaussian of width `sigma`.
pub fn smooth(set: &SupportSet, sigma: f64) -> Field {
    smooth_field(&set.indicator(), sigma).map(|v| v.clamp(0.0, 1.0))
}

/// Periodic separable Gaussian convolution with a kernel of unit discrete
/// mass along each axis.
pub fn smooth_field(field: &Field, sigma: f64) -> Field {
    let g = field.grid;
    let kq = kernel(g.nq, sigma);
    let kp = kernel(g.np, sigma);
    let mut tmp = vec![0.0; g.len()];
    // Along p: contiguous lines.
    for iq in 0..g.nq {
        let src = &field.values[iq * g.np..(iq + 1) * g.np];
        convolve_line(src, &kp, &mut tmp[iq * g.np..(iq + 1) * g.np]);
    }
    // Along q: strided lines.
    let mut out = vec![0.0; g.len()];
    let mut line = vec![0.0; g.nq];
    let mut res = vec![0.0; g.nq];
    for ip in 0..g.np {
        for iq in 0..g.nq {
            line[iq] = tmp[iq * g.np + ip];
        }
        convolve_line(&line, &kq, &mut res);
        for iq in 0..g.nq {
            out[iq * g.np + ip] = res[iq];
        }
    }
    Field { grid: g, values: out }
}

/// Offsets and weights of the periodic sampled Gaussian on `n` points of
/// spacing `1/n`.
fn kernel(n: usize, sigma: f64) -> Vec<(isize, f64)> {
    if sigma == 0.0 {
        return vec![(0, 1.0)];
    }
    let h = 1.0 / n as f64;
    let weight = |d: isize| (-(d as f64 * h).powi(2) / (2.0 * sigma * sigma)).exp();
    let reach = ((2.0 * (1.0 / KERNEL_CUTOFF).ln()).sqrt() * sigma / h).ceil() as isize;
    let mut k: Vec<(isize, f64)> = (-reach..=reach).map(|d| (d, weight(d))).collect();
    let total: f64 = k.iter().map(|x| x.1).sum();
    k.iter_mut().for_each(|x| x.1 /= total);
    k
}

fn convolve_line(src: &[f64], kernel: &[(isize, f64)], dst: &mut [f64]) {
    let n = src.len();
    if src.iter().all(|&v| v == src[0]) {
        dst.iter_mut().for_each(|d| *d = src[0]);
        return;
    }
    let ni = n as isize;
    for (i, d) in dst.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(off, w) in kernel {
            acc += w * src[(i as isize - off).rem_euclid(ni) as usize];
        }
        *d = acc;
    }
}
