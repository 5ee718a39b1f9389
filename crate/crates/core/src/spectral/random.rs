use num_complex::Complex64;
use rand::Rng;

use super::{leray_project, norms, SpectralVelocityField, TorusDomain, VectorCoefficients};

/// Shape of the amplitude spectrum used for random initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpectrum {
    /// `|û_k| ∝ |k|^{-decay}`.
    pub decay: f64,
    /// Modes with `|k|² < min_k2` are left empty.
    pub min_k2: i64,
    /// Modes with `|k|² > max_k2` are left empty; `None` keeps the whole
    /// dealiased range.
    pub max_k2: Option<i64>,
}

impl Default for RandomSpectrum {
    fn default() -> Self {
        Self {
            decay: 2.0,
            min_k2: 1,
            max_k2: None,
        }
    }
}

/// Random divergence-free field with the default `|k|^{-2}` spectrum,
/// rescaled to the given `H`-norm.
pub fn random_field<R: Rng + ?Sized>(domain: &TorusDomain, rng: &mut R, h_norm: f64) -> SpectralVelocityField {
    random_field_with(domain, rng, h_norm, RandomSpectrum::default())
}

/// Random divergence-free field supported on the dealiased modes allowed by
/// `spectrum`, rescaled to the given `H`-norm. Phases are uniform.
pub fn random_field_with<R: Rng + ?Sized>(
    domain: &TorusDomain,
    rng: &mut R,
    h_norm: f64,
    spectrum: RandomSpectrum,
) -> SpectralVelocityField {
    let mut raw = VectorCoefficients::zeros(*domain);
    let d = domain.dimension();
    for (idx, k) in domain.wavevectors() {
        if !domain.is_resolved(k) || domain.conjugate_of(k) < idx {
            continue;
        }
        let k2 = domain.k_squared(k);
        if k2 < spectrum.min_k2 || spectrum.max_k2.is_some_and(|m| k2 > m) {
            continue;
        }
        let amp = (k2 as f64).powf(-spectrum.decay / 2.0);
        let mut value = [Complex64::new(0.0, 0.0); 3];
        for slot in value.iter_mut().take(d) {
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let mag = rng.random_range(0.5..1.0);
            *slot = Complex64::from_polar(amp * mag, phase);
        }
        let j = domain.conjugate_of(k);
        for (c, z) in value.iter().enumerate().take(d) {
            let comp = raw.component_mut(c);
            comp[idx] = *z;
            comp[j] = z.conj();
        }
    }
    let u = leray_project(&raw);
    let current = norms(&u).h_norm;
    if current == 0.0 {
        return u;
    }
    u.scaled(h_norm / current)
}
