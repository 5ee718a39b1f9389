use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::symmetrize;
use super::{SpectralError, SpectralVelocityField, TorusDomain, VectorCoefficients};

/// Real vector field sampled on the uniform grid `x_j = j·L/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    domain: TorusDomain,
    data: Vec<f64>,
}

impl PhysicalField {
    pub fn from_data(domain: TorusDomain, data: Vec<f64>) -> Result<Self, SpectralError> {
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.domain.n_points();
        &self.data[c * n..(c + 1) * n]
    }

    /// Grid quadrature of `∫|u|² dx`; exact for resolved band-limited fields.
    pub fn l2_norm_squared(&self) -> f64 {
        self.domain.cell_volume() * self.data.iter().map(|x| x * x).sum::<f64>()
    }

    /// Largest pointwise speed `max_j |u(x_j)|`.
    pub fn max_speed(&self) -> f64 {
        let n = self.domain.n_points();
        let d = self.domain.dimension();
        (0..n)
            .map(|j| (0..d).map(|c| self.data[c * n + j].powi(2)).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt()
    }
}

/// Cached FFT plans for one torus resolution.
///
/// Convention: `u(x) = Σ_k û_k e^{i k·x}` (unnormalized inverse), and the
/// forward transform divides by `M^d`.
#[derive(Clone)]
pub struct SpectralTransform {
    domain: TorusDomain,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform").field("domain", &self.domain).finish()
    }
}

impl SpectralTransform {
    pub fn new(domain: TorusDomain) -> Self {
        let mut planner = FftPlanner::new();
        let m = domain.resolution();
        Self {
            domain,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn domain(&self) -> &TorusDomain {
        &self.domain
    }

    fn check(&self, other: &TorusDomain) -> Result<(), SpectralError> {
        if other != &self.domain {
            return Err(SpectralError::ResolutionMismatch {
                expected: self.domain.n_points(),
                found: other.n_points(),
            });
        }
        Ok(())
    }

    fn transform_axes(&self, fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
        let m = self.domain.resolution();
        let d = self.domain.dimension();
        let n = self.domain.n_points();
        debug_assert_eq!(buf.len(), n);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // last axis is contiguous
        fft.process_with_scratch(buf, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for axis in 0..d - 1 {
            let stride = m.pow((d - 1 - axis) as u32);
            let block = stride * m;
            for outer in (0..n).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, z) in line.iter_mut().enumerate() {
                        *z = buf[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, z) in line.iter().enumerate() {
                        buf[base + j * stride] = *z;
                    }
                }
            }
        }
    }

    /// In-place synthesis of one scalar component: coefficients to grid values.
    pub(crate) fn inverse_scalar(&self, buf: &mut [Complex64]) {
        self.transform_axes(&self.inverse, buf);
    }

    /// In-place analysis of one scalar component: grid values to coefficients.
    pub(crate) fn forward_scalar(&self, buf: &mut [Complex64]) {
        self.transform_axes(&self.forward, buf);
        let norm = 1.0 / self.domain.n_points() as f64;
        for z in buf.iter_mut() {
            *z *= norm;
        }
    }

    pub fn to_physical(&self, u: &SpectralVelocityField) -> Result<PhysicalField, SpectralError> {
        self.check(u.domain())?;
        let n = self.domain.n_points();
        let mut data = Vec::with_capacity(u.coefficients().len());
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..self.domain.dimension() {
            buf.copy_from_slice(u.component(c));
            self.inverse_scalar(&mut buf);
            data.extend(buf.iter().map(|z| z.re));
        }
        Ok(PhysicalField {
            domain: self.domain,
            data,
        })
    }

    /// Forward transform of a real grid field. The result is exactly
    /// Hermitian; it is not projected.
    pub fn to_spectral(&self, grid: &PhysicalField) -> Result<VectorCoefficients, SpectralError> {
        self.check(grid.domain())?;
        let n = self.domain.n_points();
        let mut data = Vec::with_capacity(grid.data.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..self.domain.dimension() {
            for (z, x) in buf.iter_mut().zip(grid.component(c)) {
                *z = Complex64::new(*x, 0.0);
            }
            self.forward_scalar(&mut buf);
            data.extend_from_slice(&buf);
        }
        symmetrize(&self.domain, &mut data);
        VectorCoefficients::from_data(self.domain, data)
    }
}

/// One-shot synthesis; plans a transform for `u`'s domain.
pub fn transform_to_physical(u: &SpectralVelocityField) -> PhysicalField {
    SpectralTransform::new(*u.domain())
        .to_physical(u)
        .expect("transform planned for the field's own domain")
}

/// One-shot analysis; plans a transform for `grid`'s domain.
pub fn transform_to_spectral(grid: &PhysicalField) -> VectorCoefficients {
    SpectralTransform::new(*grid.domain())
        .to_spectral(grid)
        .expect("transform planned for the grid's own domain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{leray_project, norms, random_field};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_round_trip() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let grid = transform_to_physical(&SpectralVelocityField::zeros(dom));
        assert!(grid.data().iter().all(|x| *x == 0.0));
        let back = transform_to_spectral(&grid);
        assert!(back.data().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn cosine_mode_samples() {
        // û_{±(0,1,0)} = (1/2, 0, 0)  ⇒  u = (cos y, 0, 0)
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let mut raw = VectorCoefficients::zeros(dom);
        let half = Complex64::new(0.5, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        raw.set_real_mode([0, 1, 0], [half, zero, zero]).unwrap();
        let u = leray_project(&raw);
        let grid = transform_to_physical(&u);
        for j in 0..dom.n_points() {
            let x = dom.grid_point(j);
            assert!((grid.component(0)[j] - x[1].cos()).abs() < 1e-14);
            assert!(grid.component(1)[j].abs() < 1e-15);
        }
    }

    #[test]
    fn mismatched_resolution_is_rejected() {
        let t = SpectralTransform::new(TorusDomain::periodic_cube(8).unwrap());
        let other = TorusDomain::periodic_cube(16).unwrap();
        let grid = transform_to_physical(&SpectralVelocityField::zeros(other));
        assert!(matches!(t.to_spectral(&grid), Err(SpectralError::ResolutionMismatch { .. })));
        let sq = PhysicalField::from_data(TorusDomain::periodic_square(8).unwrap(), vec![0.0; 3]);
        assert!(sq.is_err());
    }

    #[test]
    fn parseval_against_grid_quadrature_2d() {
        let dom = TorusDomain::periodic_square(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_field(&dom, &mut rng, 2.0);
        let grid = transform_to_physical(&u);
        let h2 = norms(&u).h_norm.powi(2);
        assert!((grid.l2_norm_squared() - h2).abs() <= 1e-10 * h2);
    }
}
