//! Divergence-free velocity fields on the periodic torus.
//!
//! Fields are stored as truncated Fourier series. On a zero-mean periodic
//! box the Stokes operator is diagonal, `(Au)_k = (2π/L)²|k|² û_k`, and the
//! first eigenvalue is `λ₁ = (2π/L)²` (equal to 1 for the `2π` box).

mod checkpoint;
mod domain;
mod field;
mod random;
mod transform;

use thiserror::Error;

pub use checkpoint::{read_field, write_field, FIELD_MAGIC, FIELD_VERSION};
pub use domain::{TorusDomain, Wavevector};
pub use field::{dealias, leray_project, norms, stokes_apply, NormTriple, SpectralVelocityField, VectorCoefficients};
pub use random::{random_field, random_field_with, RandomSpectrum};
pub use transform::{transform_to_physical, transform_to_spectral, PhysicalField, SpectralTransform};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("resolution mismatch: expected {expected} values, found {found}")]
    ResolutionMismatch { expected: usize, found: usize },
    #[error("wavevector {0:?} is outside the stored range")]
    WavevectorOutOfRange(Wavevector),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
}
