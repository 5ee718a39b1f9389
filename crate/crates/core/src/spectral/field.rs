use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SpectralError, TorusDomain, Wavevector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unconstrained complex vector coefficients on a torus grid.
///
/// This is the input side of [`leray_project`]: nothing is assumed
/// beyond the layout. Component `c` occupies
/// `data[c * n_points .. (c + 1) * n_points]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCoefficients {
    domain: TorusDomain,
    data: Vec<Complex64>,
}

impl VectorCoefficients {
    pub fn zeros(domain: TorusDomain) -> Self {
        Self {
            domain,
            data: vec![ZERO; domain.dimension() * domain.n_points()],
        }
    }

    pub fn from_data(domain: TorusDomain, data: Vec<Complex64>) -> Result<Self, SpectralError> {
        let expected = domain.dimension() * domain.n_points();
        if data.len() != expected {
            return Err(SpectralError::ResolutionMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { domain, data })
    }

    pub fn domain(&self) -> &TorusDomain {
        &self.domain
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.domain.n_points();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.domain.n_points();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn mode(&self, k: Wavevector) -> Option<[Complex64; 3]> {
        let idx = self.domain.index_of(k)?;
        Some(read_mode(&self.domain, &self.data, idx))
    }

    /// Overwrites `û_k`. Returns an error if `k` is outside the stored range.
    pub fn set_mode(&mut self, k: Wavevector, value: [Complex64; 3]) -> Result<(), SpectralError> {
        let idx = self
            .domain
            .index_of(k)
            .ok_or(SpectralError::WavevectorOutOfRange(k))?;
        let n = self.domain.n_points();
        for c in 0..self.domain.dimension() {
            self.data[c * n + idx] = value[c];
        }
        Ok(())
    }

    /// Sets `û_k = value` and `û_{-k} = conj(value)`, so the field stays real.
    pub fn set_real_mode(&mut self, k: Wavevector, value: [Complex64; 3]) -> Result<(), SpectralError> {
        self.set_mode(k, value)?;
        let conj = [value[0].conj(), value[1].conj(), value[2].conj()];
        self.set_mode([-k[0], -k[1], -k[2]], conj)
    }

    /// Largest `|û_{-k} - conj(û_k)|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.domain.n_points();
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for c in 0..self.domain.dimension() {
            let comp = &self.data[c * n..(c + 1) * n];
            for (i, k) in self.domain.wavevectors() {
                if self.domain.is_nyquist(k) {
                    continue;
                }
                let j = self.domain.conjugate_of(k);
                worst = worst.max((comp[j] - comp[i].conj()).norm());
            }
        }
        worst / scale
    }

    pub(crate) fn into_data(self) -> Vec<Complex64> {
        self.data
    }
}

fn read_mode(domain: &TorusDomain, data: &[Complex64], idx: usize) -> [Complex64; 3] {
    let n = domain.n_points();
    let mut out = [ZERO; 3];
    for (c, slot) in out.iter_mut().enumerate().take(domain.dimension()) {
        *slot = data[c * n + idx];
    }
    out
}

/// Real, divergence-free, zero-mean velocity field in Fourier coefficients.
///
/// Values are immutable; operations return new fields. The only way to
/// obtain one from arbitrary coefficients is [`leray_project`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVelocityField {
    domain: TorusDomain,
    data: Vec<Complex64>,
}

impl SpectralVelocityField {
    pub fn zeros(domain: TorusDomain) -> Self {
        Self {
            domain,
            data: vec![ZERO; domain.dimension() * domain.n_points()],
        }
    }

    /// Wraps coefficients that are already known to satisfy the invariants.
    pub(crate) fn from_data_unchecked(domain: TorusDomain, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), domain.dimension() * domain.n_points());
        Self { domain, data }
    }

    pub fn domain(&self) -> &TorusDomain {
        &self.domain
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.domain.n_points();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn mode(&self, k: Wavevector) -> Option<[Complex64; 3]> {
        let idx = self.domain.index_of(k)?;
        Some(read_mode(&self.domain, &self.data, idx))
    }

    pub fn to_raw(&self) -> VectorCoefficients {
        VectorCoefficients {
            domain: self.domain,
            data: self.data.clone(),
        }
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    /// `L²` inner product `⟨u, v⟩ = vol · Σ Re(û_k · conj(v̂_k))`.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.domain, other.domain, "fields live on different domains");
        let s: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        self.domain.volume() * s
    }

    /// `u + alpha · v`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        assert_eq!(self.domain, other.domain, "fields live on different domains");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b * alpha)
            .collect();
        Self::from_data_unchecked(self.domain, data)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_data_unchecked(self.domain, self.data.iter().map(|z| z * alpha).collect())
    }

    /// Largest `|k·û_k| / (|k| |û_k|)` over all modes.
    pub fn divergence_defect(&self) -> f64 {
        let n = self.domain.n_points();
        let d = self.domain.dimension();
        let mut worst = 0.0_f64;
        for (i, k) in self.domain.wavevectors() {
            let mut dot = ZERO;
            let mut mag2 = 0.0;
            for c in 0..d {
                let z = self.data[c * n + i];
                dot += z * k[c] as f64;
                mag2 += z.norm_sqr();
            }
            if mag2 > 0.0 {
                let kn = (self.domain.k_squared(k) as f64).sqrt();
                worst = worst.max(dot.norm() / (kn * mag2.sqrt()));
            }
        }
        worst
    }

    /// Checks every field invariant; used when reading checkpoints.
    pub fn validate(&self, tol: f64) -> Result<(), SpectralError> {
        if let Some(idx) = self.data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SpectralError::InvalidField(format!("non-finite coefficient at slot {idx}")));
        }
        let zero_mode = read_mode(&self.domain, &self.data, 0);
        if zero_mode.iter().any(|z| *z != ZERO) {
            return Err(SpectralError::InvalidField("nonzero mean mode".into()));
        }
        let div = self.divergence_defect();
        if div > tol {
            return Err(SpectralError::InvalidField(format!("divergence defect {div:e}")));
        }
        let herm = self.to_raw().hermitian_defect();
        if herm > tol {
            return Err(SpectralError::InvalidField(format!("Hermitian defect {herm:e}")));
        }
        Ok(())
    }

    /// Same field on another resolution of the same torus: shared modes are
    /// copied, the rest are zero (padding or truncation).
    pub fn resample(&self, target: TorusDomain) -> Result<Self, SpectralError> {
        let src = self.domain;
        if src.dimension() != target.dimension() || src.edge_length() != target.edge_length() {
            return Err(SpectralError::InvalidDomain(
                "resampling needs the same dimension and edge length".into(),
            ));
        }
        let (ns, nt) = (src.n_points(), target.n_points());
        let mut data = vec![ZERO; target.dimension() * nt];
        for (it, k) in target.wavevectors() {
            if target.is_nyquist(k) || src.is_nyquist(k) {
                continue;
            }
            if let Some(is) = src.index_of(k) {
                for c in 0..target.dimension() {
                    data[c * nt + it] = self.data[c * ns + is];
                }
            }
        }
        Ok(Self::from_data_unchecked(target, data))
    }
}

impl Add for &SpectralVelocityField {
    type Output = SpectralVelocityField;
    fn add(self, rhs: Self) -> SpectralVelocityField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralVelocityField {
    type Output = SpectralVelocityField;
    fn sub(self, rhs: Self) -> SpectralVelocityField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralVelocityField {
    type Output = SpectralVelocityField;
    fn mul(self, rhs: f64) -> SpectralVelocityField {
        self.scaled(rhs)
    }
}

/// `(‖u‖₂, ‖u‖, ‖Au‖₂)`: the `H`, `V` and Stokes norms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormTriple {
    pub h_norm: f64,
    pub v_norm: f64,
    pub a_norm: f64,
}

impl NormTriple {
    pub fn is_finite(&self) -> bool {
        self.h_norm.is_finite() && self.v_norm.is_finite() && self.a_norm.is_finite()
    }
}

/// Leray projection onto divergence-free, zero-mean fields.
///
/// Applies `û_k ← û_k − k (k·û_k)/|k|²`, clears the mean mode and the
/// Nyquist planes (whose conjugate partner is not representable), and
/// restores exact Hermitian pairing.
pub fn leray_project(raw: &VectorCoefficients) -> SpectralVelocityField {
    let dom = *raw.domain();
    let n = dom.n_points();
    let d = dom.dimension();
    let mut out = raw.data.clone();
    let (ux, rest) = out.split_at_mut(n);
    let (uy, uz) = rest.split_at_mut(n);
    for (i, k) in dom.wavevectors() {
        if i == 0 || dom.is_nyquist(k) {
            ux[i] = ZERO;
            uy[i] = ZERO;
            if d == 3 {
                uz[i] = ZERO;
            }
            continue;
        }
        let kf = k.map(|x| x as f64);
        let k2 = dom.k_squared(k) as f64;
        let mut dot = ux[i] * kf[0] + uy[i] * kf[1];
        if d == 3 {
            dot += uz[i] * kf[2];
        }
        let g = dot / k2;
        ux[i] -= g * kf[0];
        uy[i] -= g * kf[1];
        if d == 3 {
            uz[i] -= g * kf[2];
        }
    }
    symmetrize(&dom, &mut out);
    SpectralVelocityField::from_data_unchecked(dom, out)
}

/// Replaces each Hermitian pair by its average so that `û_{-k} = conj(û_k)`
/// holds bit-for-bit.
pub(crate) fn symmetrize(dom: &TorusDomain, data: &mut [Complex64]) {
    let n = dom.n_points();
    for (i, k) in dom.wavevectors() {
        let j = dom.conjugate_of(k);
        if j < i {
            continue;
        }
        for c in 0..dom.dimension() {
            let (a, b) = (c * n + i, c * n + j);
            if a == b {
                data[a].im = 0.0;
            } else {
                let avg = (data[a] + data[b].conj()) * 0.5;
                data[a] = avg;
                data[b] = avg.conj();
            }
        }
    }
}

/// Zeroes every mode with some `|k_i|` above the two-thirds cutoff.
pub fn dealias(u: &SpectralVelocityField) -> SpectralVelocityField {
    let dom = *u.domain();
    let n = dom.n_points();
    let mut out = u.data.clone();
    for (i, k) in dom.wavevectors() {
        if !dom.is_resolved(k) {
            for c in 0..dom.dimension() {
                out[c * n + i] = ZERO;
            }
        }
    }
    SpectralVelocityField::from_data_unchecked(dom, out)
}

/// Stokes operator: `(Au)_k = (2π/L)²|k|² û_k`.
pub fn stokes_apply(u: &SpectralVelocityField) -> SpectralVelocityField {
    let dom = *u.domain();
    let n = dom.n_points();
    let mut out = u.data.clone();
    for (i, k) in dom.wavevectors() {
        let lam = dom.stokes_eigenvalue(k);
        for c in 0..dom.dimension() {
            out[c * n + i] *= lam;
        }
    }
    SpectralVelocityField::from_data_unchecked(dom, out)
}

/// `H`, `V` and Stokes norms with the volume factor `L^d`:
/// `‖u‖₂² = L^d Σ|û_k|²`, `‖u‖² = L^d Σ λ_k|û_k|²`, `‖Au‖₂² = L^d Σ λ_k²|û_k|²`.
pub fn norms(u: &SpectralVelocityField) -> NormTriple {
    let dom = u.domain();
    let n = dom.n_points();
    let (mut h, mut v, mut a) = (0.0, 0.0, 0.0);
    for (i, k) in dom.wavevectors() {
        let mut mag2 = 0.0;
        for c in 0..dom.dimension() {
            mag2 += u.data[c * n + i].norm_sqr();
        }
        if mag2 == 0.0 {
            continue;
        }
        let lam = dom.stokes_eigenvalue(k);
        h += mag2;
        v += lam * mag2;
        a += lam * lam * mag2;
    }
    let vol = dom.volume();
    NormTriple {
        h_norm: (vol * h).sqrt(),
        v_norm: (vol * v).sqrt(),
        a_norm: (vol * a).sqrt(),
    }
}
