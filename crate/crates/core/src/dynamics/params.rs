use sha2::{Digest, Sha256};

use crate::spectral::{dealias, norms, SpectralVelocityField, TorusDomain};

use super::DynamicsError;

/// Everything that defines the discrete semigroup: viscosity, modulation
/// threshold, time-independent forcing, time step and domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GmnseParams {
    nu: f64,
    n_cap: f64,
    dt: f64,
    forcing: SpectralVelocityField,
}

impl GmnseParams {
    /// The forcing is truncated to the dealiased modes on ingestion; it is
    /// already divergence-free by construction of [`SpectralVelocityField`].
    pub fn new(nu: f64, n_cap: f64, dt: f64, forcing: SpectralVelocityField) -> Result<Self, DynamicsError> {
        for (name, value) in [("nu", nu), ("n_cap", n_cap), ("dt", dt)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(DynamicsError::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(Self {
            nu,
            n_cap,
            dt,
            forcing: dealias(&forcing),
        })
    }

    /// Unforced system on `domain`.
    pub fn unforced(domain: TorusDomain, nu: f64, n_cap: f64, dt: f64) -> Result<Self, DynamicsError> {
        Self::new(nu, n_cap, dt, SpectralVelocityField::zeros(domain))
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn n_cap(&self) -> f64 {
        self.n_cap
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn forcing(&self) -> &SpectralVelocityField {
        &self.forcing
    }

    pub fn domain(&self) -> &TorusDomain {
        self.forcing.domain()
    }

    pub fn lambda1(&self) -> f64 {
        self.domain().lambda1()
    }

    /// `‖f‖₂²`.
    pub fn forcing_h_norm_sq(&self) -> f64 {
        norms(&self.forcing).h_norm.powi(2)
    }

    /// SHA-256 over the bit patterns of every parameter, the domain and the
    /// forcing coefficients, as lowercase hex.
    pub fn fingerprint(&self) -> String {
        let dom = self.domain();
        let mut h = Sha256::new();
        h.update(b"gmnse-params v1");
        for v in [self.nu, self.n_cap, self.dt, dom.edge_length()] {
            h.update(v.to_bits().to_le_bytes());
        }
        h.update((dom.dimension() as u64).to_le_bytes());
        h.update((dom.resolution() as u64).to_le_bytes());
        for z in self.forcing.coefficients() {
            h.update(z.re.to_bits().to_le_bytes());
            h.update(z.im.to_bits().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Same system with a different time step.
    pub fn with_dt(&self, dt: f64) -> Result<Self, DynamicsError> {
        Self::new(self.nu, self.n_cap, dt, self.forcing.clone())
    }

    /// Same system with a different forcing.
    pub fn with_forcing(&self, forcing: SpectralVelocityField) -> Result<Self, DynamicsError> {
        Self::new(self.nu, self.n_cap, self.dt, forcing)
    }

    /// Number of steps covering `t`, rounded to the nearest integer.
    pub fn steps_for(&self, t: f64) -> Result<usize, DynamicsError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(DynamicsError::InvalidTime(t));
        }
        Ok((t / self.dt).round() as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_and_step_counts() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        assert!(GmnseParams::unforced(dom, 0.0, 10.0, 1e-3).is_err());
        assert!(GmnseParams::unforced(dom, 1.0, f64::NAN, 1e-3).is_err());
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-3).unwrap();
        assert_eq!(p.steps_for(0.25).unwrap(), 250);
        assert_eq!(p.steps_for(0.0).unwrap(), 0);
        assert!(p.steps_for(-1.0).is_err());
    }

    #[test]
    fn fingerprint_tracks_every_parameter() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-3).unwrap();
        assert_eq!(p.fingerprint(), p.clone().fingerprint());
        assert_eq!(p.fingerprint().len(), 64);
        assert_ne!(p.fingerprint(), p.with_dt(2e-3).unwrap().fingerprint());
        let other = GmnseParams::unforced(TorusDomain::periodic_cube(16).unwrap(), 1.0, 10.0, 1e-3).unwrap();
        assert_ne!(p.fingerprint(), other.fingerprint());
    }
}
