//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use gmnse::spectral::{SpectralVelocityField, TorusDomain, VectorCoefficients};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Advective form `Σ_{p+q=k} (û_p · i q) û_q` summed over resolved modes,
/// followed by the projection formula written out directly.
pub fn convolution_oracle(u: &SpectralVelocityField) -> Vec<[Complex64; 3]> {
    let dom = *u.domain();
    let d = dom.dimension();
    let lim = dom.dealias_limit();
    let modes: Vec<([i64; 3], [Complex64; 3])> = dom
        .wavevectors()
        .filter(|(_, k)| dom.is_resolved(*k))
        .map(|(_, k)| (k, u.mode(k).unwrap()))
        .collect();
    let mut out = vec![[ZERO; 3]; dom.n_points()];
    for (p, up) in &modes {
        for (q, uq) in &modes {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if k == [0, 0, 0] || k.iter().any(|x| x.abs() > lim) {
                continue;
            }
            let mut adv = ZERO;
            for j in 0..d {
                adv += up[j] * Complex64::new(0.0, q[j] as f64);
            }
            let idx = dom.index_of(k).unwrap();
            for i in 0..d {
                out[idx][i] += adv * uq[i];
            }
        }
    }
    for (idx, k) in dom.wavevectors() {
        let k2: f64 = k.iter().map(|x| (x * x) as f64).sum();
        if k2 == 0.0 {
            continue;
        }
        let mut dot = ZERO;
        for i in 0..d {
            dot += out[idx][i] * k[i] as f64;
        }
        for i in 0..d {
            out[idx][i] -= dot * (k[i] as f64 / k2);
        }
    }
    out
}

pub fn max_rel_diff(a: &SpectralVelocityField, oracle: &[[Complex64; 3]]) -> f64 {
    let dom = a.domain();
    let scale = oracle.iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst = 0.0_f64;
    for (idx, k) in dom.wavevectors() {
        let m = a.mode(k).unwrap();
        for c in 0..dom.dimension() {
            worst = worst.max((m[c] - oracle[idx][c]).norm());
        }
    }
    worst / scale
}

/// Real-valued but otherwise arbitrary coefficients, gradients and mean
/// included.
pub fn raw_real(dom: TorusDomain, seed: u64) -> VectorCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = VectorCoefficients::zeros(dom);
    let n = dom.n_points();
    for (i, k) in dom.wavevectors() {
        let j = dom.index_of([-k[0], -k[1], -k[2]]).unwrap_or(i);
        if j < i || dom.is_nyquist(k) {
            continue;
        }
        for c in 0..dom.dimension() {
            let im = if i == 0 { 0.0 } else { rng.random_range(-1.0..1.0) };
            let z = Complex64::new(rng.random_range(-1.0..1.0), im);
            raw.component_mut(c)[i] = z;
            raw.component_mut(c)[j] = z.conj();
        }
    }
    debug_assert_eq!(raw.data().len(), dom.dimension() * n);
    raw
}

pub fn raw_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).fold(0.0, f64::max).sqrt()
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt()
}
