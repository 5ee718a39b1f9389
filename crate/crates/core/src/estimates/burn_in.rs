use crate::dynamics::{GmnseParams, RecordingPlan, Stepper, TrajectoryRecord};
use crate::spectral::SpectralVelocityField;

use super::{absorbing_radii, monitor_absorbing, monitor_enstrophy, AbsorbingRadii, EstimateError, MonitorReport};

/// A state that a recorded transient has placed inside both absorbing balls.
#[derive(Debug, Clone)]
pub struct BurnIn {
    /// State at the end of the transient.
    pub state: SpectralVelocityField,
    /// `τ₀ + 1`, the first time from which `V`-ball membership was checked.
    pub certified_from: f64,
    /// Radii with the constant fitted on the transient itself.
    pub radii: AbsorbingRadii,
    pub enstrophy: MonitorReport,
    pub absorbing: MonitorReport,
    pub record: TrajectoryRecord,
}

/// Evolves `u0` for `t_burn` and certifies `H`-ball entry, `H`-ball
/// invariance and `V`-ball membership on every sample from `τ₀ + 1` on.
/// The `V` radius uses the enstrophy constant fitted on this transient.
pub fn burn_in(
    u0: &SpectralVelocityField,
    p: &GmnseParams,
    t_burn: f64,
    record_every: usize,
) -> Result<BurnIn, EstimateError> {
    let record = Stepper::new(p.clone()).evolve(u0, t_burn, RecordingPlan::every(record_every))?;
    let not_certified = |reason: String| EstimateError::BurnInNotCertified { t_burn, reason };
    if record.len() < 2 {
        return Err(not_certified("transient too short to record".into()));
    }
    let enstrophy = monitor_enstrophy(&record, p)?;
    let c = enstrophy.fitted_c.unwrap_or(0.0);
    if !c.is_finite() {
        return Err(not_certified("enstrophy constant is unbounded".into()));
    }
    let radii = absorbing_radii(p, c);
    let absorbing = monitor_absorbing(&record, &radii)?;
    if absorbing.constant("h_entered") != Some(1.0) {
        return Err(not_certified("never entered the H absorbing ball".into()));
    }
    if absorbing.constant("h_remains") != Some(1.0) {
        return Err(not_certified("left the H absorbing ball after entry".into()));
    }
    if absorbing.constant("v_samples_checked").unwrap_or(0.0) == 0.0 {
        return Err(not_certified(format!(
            "no samples after τ₀ + 1 = {}",
            absorbing.constant("v_check_start").unwrap_or(f64::NAN)
        )));
    }
    if absorbing.constant("v_violation_fraction") != Some(0.0) {
        return Err(not_certified("outside the V absorbing ball after τ₀ + 1".into()));
    }
    Ok(BurnIn {
        state: record.final_state.clone(),
        certified_from: absorbing.constant("v_check_start").unwrap_or(0.0),
        radii,
        enstrophy,
        absorbing,
        record,
    })
}
