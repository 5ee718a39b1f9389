//! Finite ensembles of states: attractor sampling, Hausdorff semidistances,
//! attraction-rate fits and box-counting dimension estimates.

mod dimension;
mod persist;
mod rate;
mod sampling;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, GmnseParams, Stepper};
use crate::spectral::{norms, SpectralError, SpectralVelocityField, TorusDomain};

pub use dimension::{box_count_points, box_counting_dimension, dyadic_scales, project_ensemble, DimensionEstimate};
pub use persist::{read_ensemble, write_ensemble, EnsembleManifest, ENSEMBLE_FORMAT, ENSEMBLE_VERSION};
pub use rate::{fit_attraction_rate, FitResult, DISTANCE_FLOOR};
pub use sampling::approximate_attractor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleLabel {
    InitialSet,
    AttractorApprox,
    ExpAttractorCandidate,
}

impl fmt::Display for EnsembleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InitialSet => "initial-set",
            Self::AttractorApprox => "attractor-approx",
            Self::ExpAttractorCandidate => "exp-attractor-candidate",
        })
    }
}

/// Nonempty finite set of fields on one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    members: Vec<SpectralVelocityField>,
    label: EnsembleLabel,
}

impl EnsembleState {
    pub fn new(members: Vec<SpectralVelocityField>, label: EnsembleLabel) -> Result<Self, AttractorError> {
        let first = members.first().ok_or(AttractorError::EmptyEnsemble)?;
        let dom = *first.domain();
        if members.iter().any(|m| *m.domain() != dom) {
            return Err(AttractorError::DomainMismatch);
        }
        Ok(Self { members, label })
    }

    pub fn singleton(u: SpectralVelocityField, label: EnsembleLabel) -> Self {
        Self {
            members: vec![u],
            label,
        }
    }

    pub fn members(&self) -> &[SpectralVelocityField] {
        &self.members
    }

    pub fn into_members(self) -> Vec<SpectralVelocityField> {
        self.members
    }

    pub fn label(&self) -> EnsembleLabel {
        self.label
    }

    pub fn with_label(mut self, label: EnsembleLabel) -> Self {
        self.label = label;
        self
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn domain(&self) -> &TorusDomain {
        self.members[0].domain()
    }

    /// Largest `H`-norm over the members.
    pub fn max_h_norm(&self) -> f64 {
        self.members.iter().map(|m| norms(m).h_norm).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    /// `L²` norm.
    H,
    /// Gradient norm.
    V,
}

/// Applies `S(t)` to every member independently (in parallel). The result
/// keeps the label and member order.
pub fn evolve_ensemble(e: &EnsembleState, p: &GmnseParams, t: f64) -> Result<EnsembleState, AttractorError> {
    if e.domain() != p.domain() {
        return Err(AttractorError::DomainMismatch);
    }
    let n_steps = p.steps_for(t).map_err(|source| AttractorError::Member { member: 0, source })?;
    let stepper = Stepper::new(p.clone());
    let members = e
        .members
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            stepper
                .advance(u, n_steps)
                .map_err(|source| AttractorError::Member { member: i, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EnsembleState {
        members,
        label: e.label,
    })
}

/// `max_{x∈a} min_{y∈b} ‖x − y‖`, exact over the two finite sets.
pub fn hausdorff_semidistance(a: &EnsembleState, b: &EnsembleState, norm: NormKind) -> Result<f64, AttractorError> {
    if a.is_empty() || b.is_empty() {
        return Err(AttractorError::EmptyEnsemble);
    }
    if a.domain() != b.domain() {
        return Err(AttractorError::DomainMismatch);
    }
    let dist = |x: &SpectralVelocityField, y: &SpectralVelocityField| {
        let n = norms(&(x - y));
        match norm {
            NormKind::H => n.h_norm,
            NormKind::V => n.v_norm,
        }
    };
    let d = a
        .members
        .par_iter()
        .map(|x| b.members.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    Ok(d)
}

#[derive(Debug, Error)]
pub enum AttractorError {
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("ensemble members or parameters live on different domains")]
    DomainMismatch,
    #[error("member {member}: {source}")]
    Member {
        member: usize,
        #[source]
        source: DynamicsError,
    },
    #[error(
        "member {member} is not inside the absorbing ball at t = {t_transient} \
         (h² = {h_sq:.6e}, radius² = {radius_sq:.6e}); extend t_transient"
    )]
    NotAbsorbed {
        member: usize,
        t_transient: f64,
        h_sq: f64,
        radius_sq: f64,
    },
    #[error("need at least {needed} usable samples, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ensemble i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("ensemble member: {0}")]
    Field(#[from] SpectralError),
    #[error("ensemble manifest: {0}")]
    Manifest(String),
}
