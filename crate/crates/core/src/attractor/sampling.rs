use rayon::prelude::*;

use crate::dynamics::{GmnseParams, Stepper};
use crate::estimates::{absorbing_radii, holds};
use crate::spectral::{norms, SpectralVelocityField};

use super::{AttractorError, EnsembleLabel, EnsembleState};

/// ω-limit sampling: evolves every seed member for `t_transient`, checks
/// that it sits inside the `H` absorbing ball, then keeps `n_snapshots`
/// states at `t_transient + j·t_sample/n_snapshots`, `j = 0..n_snapshots`.
///
/// Snapshots are ordered member-major. A member outside the ball at
/// `t_transient` is an error: the transient is too short to claim anything.
pub fn approximate_attractor(
    seed: &EnsembleState,
    p: &GmnseParams,
    t_transient: f64,
    t_sample: f64,
    n_snapshots: usize,
) -> Result<EnsembleState, AttractorError> {
    if seed.domain() != p.domain() {
        return Err(AttractorError::DomainMismatch);
    }
    if n_snapshots == 0 {
        return Err(AttractorError::InvalidArgument("n_snapshots must be positive".into()));
    }
    if !(t_sample >= 0.0 && t_sample.is_finite()) {
        return Err(AttractorError::InvalidArgument(format!("t_sample = {t_sample}")));
    }
    let member_err = |member| move |source| AttractorError::Member { member, source };
    let transient_steps = p.steps_for(t_transient).map_err(member_err(0))?;
    let gap = p.steps_for(t_sample / n_snapshots as f64).map_err(member_err(0))?;
    let radius_sq = absorbing_radii(p, 0.0).rho_h_sq;
    let stepper = Stepper::new(p.clone());

    let per_member: Vec<Vec<SpectralVelocityField>> = seed
        .members()
        .par_iter()
        .enumerate()
        .map(|(i, u0)| {
            let mut u = stepper.advance(u0, transient_steps).map_err(member_err(i))?;
            let h_sq = norms(&u).h_norm.powi(2);
            if !holds(h_sq - radius_sq, radius_sq) {
                return Err(AttractorError::NotAbsorbed {
                    member: i,
                    t_transient,
                    h_sq,
                    radius_sq,
                });
            }
            let mut snaps = Vec::with_capacity(n_snapshots);
            snaps.push(u.clone());
            for _ in 1..n_snapshots {
                u = stepper.advance(&u, gap).map_err(member_err(i))?;
                snaps.push(u.clone());
            }
            Ok(snaps)
        })
        .collect::<Result<_, _>>()?;
    EnsembleState::new(per_member.into_iter().flatten().collect(), EnsembleLabel::AttractorApprox)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_field, TorusDomain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn short_transient_is_refused() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = GmnseParams::new(1.0, 10.0, 1e-3, random_field(&dom, &mut rng, 1.0)).unwrap();
        let radius = absorbing_radii(&p, 0.0).rho_h_sq.sqrt();
        let seed = EnsembleState::singleton(random_field(&dom, &mut rng, 10.0 * radius), EnsembleLabel::InitialSet);
        let err = approximate_attractor(&seed, &p, 0.01, 0.0, 1).unwrap_err();
        assert!(err.to_string().contains("extend t_transient"));
    }

    #[test]
    fn unforced_flow_collapses_to_zero() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let members = (0..2).map(|_| random_field(&dom, &mut rng, 1e-2)).collect();
        let seed = EnsembleState::new(members, EnsembleLabel::InitialSet).unwrap();
        let a = approximate_attractor(&seed, &p, 8.0, 1.0, 4).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a.label(), EnsembleLabel::AttractorApprox);
        assert!(a.max_h_norm() < 1e-4);
    }
}
