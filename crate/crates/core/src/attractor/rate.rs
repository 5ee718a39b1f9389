use serde::{Deserialize, Serialize};

use crate::dynamics::GmnseParams;
use crate::regression::fit_line;

use super::{evolve_ensemble, hausdorff_semidistance, AttractorError, EnsembleState, NormKind};

/// Distances at or below this are treated as converged and left out of the
/// log-linear fit.
pub const DISTANCE_FLOOR: f64 = 10.0 * f64::EPSILON;

/// `d(t) ≈ Q e^{−ρ t}` fitted by least squares on `(t, ln d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub q_factor: f64,
    /// `ρ`; `+∞` when every distance is below the floor.
    pub rate: f64,
    /// Coefficient of determination of the log-linear fit, reported as is.
    pub goodness: Option<f64>,
    /// Every `(t, d(t))` computed, including those below the floor.
    pub samples: Vec<(f64, f64)>,
    /// All distances were below [`DISTANCE_FLOOR`].
    pub converged: bool,
}

impl FitResult {
    /// A fit counts as an exponential attraction only with a positive rate.
    pub fn accepted(&self) -> bool {
        self.rate > 0.0
    }
}

/// Evolves `b` through the increasing `times` and fits the decay of
/// `dist_H(S(t)b, candidate)`.
pub fn fit_attraction_rate(
    b: &EnsembleState,
    candidate: &EnsembleState,
    p: &GmnseParams,
    times: &[f64],
) -> Result<FitResult, AttractorError> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(AttractorError::InvalidArgument("times must be nonnegative and increasing".into()));
    }
    let mut samples = Vec::with_capacity(times.len());
    let mut state = b.clone();
    let mut now = 0.0;
    for &t in times {
        state = evolve_ensemble(&state, p, t - now)?;
        now = t;
        samples.push((t, hausdorff_semidistance(&state, candidate, NormKind::H)?));
    }
    let usable: Vec<(f64, f64)> = samples.iter().copied().filter(|(_, d)| *d > DISTANCE_FLOOR).collect();
    if usable.is_empty() && !samples.is_empty() {
        return Ok(FitResult {
            q_factor: 0.0,
            rate: f64::INFINITY,
            goodness: None,
            samples,
            converged: true,
        });
    }
    if usable.len() < 3 {
        return Err(AttractorError::InsufficientSamples {
            needed: 3,
            found: usable.len(),
        });
    }
    let ts: Vec<f64> = usable.iter().map(|(t, _)| *t).collect();
    let logs: Vec<f64> = usable.iter().map(|(_, d)| d.ln()).collect();
    let fit = fit_line(&ts, &logs).ok_or(AttractorError::InsufficientSamples {
        needed: 3,
        found: usable.len(),
    })?;
    Ok(FitResult {
        q_factor: fit.intercept.exp(),
        rate: -fit.slope,
        goodness: fit.r_squared,
        samples,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::EnsembleLabel;
    use crate::spectral::{random_field, SpectralVelocityField, TorusDomain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_sets_are_converged() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-2).unwrap();
        // the zero state is fixed when f = 0
        let e = EnsembleState::singleton(SpectralVelocityField::zeros(dom), EnsembleLabel::InitialSet);
        let fit = fit_attraction_rate(&e, &e, &p, &[0.0, 0.1, 0.2]).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.rate, f64::INFINITY);
        assert!(fit.goodness.is_none());
    }

    #[test]
    fn unforced_decay_rate_toward_zero() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-2).unwrap();
        let members = (0..3).map(|_| random_field(&dom, &mut rng, 1.0)).collect();
        let b = EnsembleState::new(members, EnsembleLabel::InitialSet).unwrap();
        let zero = EnsembleState::singleton(SpectralVelocityField::zeros(dom), EnsembleLabel::ExpAttractorCandidate);
        let times: Vec<f64> = (1..=6).map(|i| 0.5 * i as f64).collect();
        let fit = fit_attraction_rate(&b, &zero, &p, &times).unwrap();
        assert!(fit.accepted());
        assert!(fit.rate >= 0.8 * p.nu() * p.lambda1(), "rate {}", fit.rate);
        assert!(fit.goodness.unwrap() >= 0.95);
        assert_eq!(fit.samples.len(), 6);

        assert!(fit_attraction_rate(&b, &zero, &p, &[1.0, 0.5]).is_err());
        assert!(matches!(
            fit_attraction_rate(&b, &zero, &p, &[0.5, 1.0]),
            Err(AttractorError::InsufficientSamples { .. })
        ));
    }
}
