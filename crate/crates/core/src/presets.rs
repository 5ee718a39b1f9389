//! Named forcings and the default parameter set.

use num_complex::Complex64;

use crate::dynamics::{DynamicsError, GmnseParams};
use crate::spectral::{leray_project, SpectralError, SpectralVelocityField, TorusDomain, VectorCoefficients};

pub const DEFAULT_NU: f64 = 1.0;
pub const DEFAULT_N_CAP: f64 = 10.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_RESOLUTION: usize = 16;
pub const DEFAULT_DIMENSION: usize = 3;
pub const DEFAULT_AMPLITUDE: f64 = 1.0;

/// `f = A (sin(s y), sin(s z), sin(s x))` in 3D and `A (sin(s y), sin(s x))`
/// in 2D, with `s = 2π/L`. Each component is a single `|k|² = 1` mode
/// orthogonal to its wavevector, so `f` is divergence-free as given and
/// `‖f‖₂² = A² L^d d / 2`.
pub fn taylor_green_like(domain: TorusDomain, amplitude: f64) -> Result<SpectralVelocityField, SpectralError> {
    let z = Complex64::new(0.0, 0.0);
    // sin θ = (e^{iθ} − e^{−iθ}) / 2i  ⇒  coefficient −i/2 at +k
    let s = Complex64::new(0.0, -0.5 * amplitude);
    let mut raw = VectorCoefficients::zeros(domain);
    if domain.dimension() == 2 {
        raw.set_real_mode([0, 1, 0], [s, z, z])?;
        raw.set_real_mode([1, 0, 0], [z, s, z])?;
    } else {
        raw.set_real_mode([0, 1, 0], [s, z, z])?;
        raw.set_real_mode([0, 0, 1], [z, s, z])?;
        raw.set_real_mode([1, 0, 0], [z, z, s])?;
    }
    Ok(leray_project(&raw))
}

/// `ν = 1`, `N = 10`, `dt = 10⁻³` on the `16³` torus of side `2π` with the
/// unit-amplitude [`taylor_green_like`] forcing.
pub fn default_params() -> GmnseParams {
    let dom = TorusDomain::periodic_cube(DEFAULT_RESOLUTION).expect("valid default domain");
    let f = taylor_green_like(dom, DEFAULT_AMPLITUDE).expect("modes fit the default grid");
    GmnseParams::new(DEFAULT_NU, DEFAULT_N_CAP, DEFAULT_DT, f).expect("valid default parameters")
}

/// The default preset moved to another resolution (same forcing).
pub fn default_params_at(resolution: usize) -> Result<GmnseParams, DynamicsError> {
    let dom = TorusDomain::periodic_cube(resolution).map_err(|e| DynamicsError::InvalidParams(e.to_string()))?;
    let f = taylor_green_like(dom, DEFAULT_AMPLITUDE).map_err(|e| DynamicsError::InvalidParams(e.to_string()))?;
    GmnseParams::new(DEFAULT_NU, DEFAULT_N_CAP, DEFAULT_DT, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{norms, transform_to_physical};
    use std::f64::consts::PI;

    #[test]
    fn samples_match_closed_form() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let f = taylor_green_like(dom, 1.5).unwrap();
        let phys = transform_to_physical(&f);
        for idx in [0, 9, 77, 300] {
            let [x, y, z] = dom.grid_point(idx);
            let want = [1.5 * y.sin(), 1.5 * z.sin(), 1.5 * x.sin()];
            for c in 0..3 {
                assert!((phys.component(c)[idx] - want[c]).abs() < 1e-13);
            }
        }
        let vol = (2.0 * PI).powi(3);
        assert!((norms(&f).h_norm.powi(2) - 1.5 * 1.5 * vol * 3.0 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn default_preset_values() {
        let p = default_params();
        assert_eq!((p.nu(), p.n_cap(), p.dt()), (1.0, 10.0, 1e-3));
        assert_eq!(p.domain().resolution(), 16);
        assert_eq!(p.domain().dimension(), 3);
        assert!(p.forcing().divergence_defect() < 1e-15);
        let f2d = taylor_green_like(TorusDomain::periodic_square(8).unwrap(), 1.0).unwrap();
        assert!((norms(&f2d).h_norm.powi(2) - (2.0 * PI).powi(2)).abs() < 1e-10);
    }
}
