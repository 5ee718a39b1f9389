use crate::dynamics::{GmnseParams, TrajectoryRecord};
use crate::spectral::norms;

use super::{holds, AbsorbingRadii, EstimateError, InequalityId, MonitorReport};

/// Explicit time-regularity modulus
///
/// `ϱ₃(s)² = 2‖f‖₂² s + (1/ν)(2ν² + C N²)((2/ν)‖f‖₂² s + C N⁴ ρ₁ s + ρ₁)`
///
/// with `C = radii.fitted_c` in both places and `ρ₁ = radii.rho_v_sq_formula`.
pub fn rho3_formula(s: f64, p: &GmnseParams, radii: &AbsorbingRadii) -> f64 {
    let nu = p.nu();
    let f2 = p.forcing_h_norm_sq();
    let c = radii.fitted_c;
    let n = p.n_cap();
    let rho1 = radii.rho_v_sq_formula;
    let inner = 2.0 / nu * f2 * s + c * n.powi(4) * rho1 * s + rho1;
    (2.0 * f2 * s + (2.0 * nu * nu + c * n * n) / nu * inner).sqrt()
}

/// Hölder-1/2 regularity in time over every pair of stored checkpoints.
///
/// For each pair `(t̃ < t)` with `s = t − t̃` the ratio
/// `‖u(t) − u(t̃)‖₂ / s^{1/2}` is compared with [`rho3_formula`]; the
/// residual is `ratio − ϱ₃(s)` and the report's abscissa is `s`. The largest
/// ratio is reported as `rho3_hat`.
pub fn monitor_time_regularity(
    tr: &TrajectoryRecord,
    p: &GmnseParams,
    radii: &AbsorbingRadii,
) -> Result<MonitorReport, EstimateError> {
    let cps = &tr.checkpoints;
    if cps.len() < 2 {
        return Err(EstimateError::InsufficientSamples {
            needed: 2,
            found: cps.len(),
        });
    }
    let mut rep = MonitorReport::new(InequalityId::TimeRegularity);
    rep.fitted_c = Some(radii.fitted_c);
    let mut rho3_hat = 0.0_f64;
    let mut worst_margin = f64::NEG_INFINITY;
    let (mut bad, mut total) = (0usize, 0usize);
    for i in 0..cps.len() {
        for j in i + 1..cps.len() {
            let s = (cps[j].0 - cps[i].0).abs();
            if s == 0.0 {
                continue;
            }
            let ratio = norms(&(&cps[j].1 - &cps[i].1)).h_norm / s.sqrt();
            let bound = rho3_formula(s, p, radii);
            rho3_hat = rho3_hat.max(ratio);
            worst_margin = worst_margin.max(ratio - bound);
            rep.times.push(s);
            rep.residual_series.push(ratio - bound);
            total += 1;
            if !holds(ratio - bound, bound) {
                bad += 1;
            }
        }
    }
    rep.violation_fraction = if total == 0 { 0.0 } else { bad as f64 / total as f64 };
    rep.set("rho3_hat", rho3_hat);
    rep.set("pairs", total as f64);
    rep.set("within_formula", f64::from(u8::from(bad == 0)));
    rep.set("rho1", radii.rho_v_sq_formula);
    if total > 0 {
        rep.set("worst_margin", worst_margin);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{RecordingPlan, Stepper};
    use crate::estimates::absorbing_radii;
    use crate::spectral::{random_field, SpectralVelocityField, TorusDomain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn formula_at_unit_values() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 2.0, 1e-3).unwrap();
        let mut radii = absorbing_radii(&p, 0.5);
        radii.rho_v_sq_formula = 3.0;
        // f = 0: (2 + 0.5·4)·(0.5·16·3·s + 3)
        let s = 0.25;
        let want = (4.0 * (6.0 + 3.0_f64)).sqrt();
        assert!((rho3_formula(s, &p, &radii) - want).abs() < 1e-14);
    }

    #[test]
    fn steady_state_has_zero_ratio() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-2).unwrap();
        let radii = absorbing_radii(&p, 0.0);
        let tr = Stepper::new(p.clone())
            .evolve(&SpectralVelocityField::zeros(dom), 0.1, RecordingPlan::every(1).with_checkpoints(2))
            .unwrap();
        let rep = monitor_time_regularity(&tr, &p, &radii).unwrap();
        assert_eq!(rep.constant("rho3_hat"), Some(0.0));
        assert_eq!(rep.violation_fraction, 0.0);

        let only_one = Stepper::new(p.clone())
            .evolve(&SpectralVelocityField::zeros(dom), 0.01, RecordingPlan::every(1).with_checkpoints(5))
            .unwrap();
        assert!(monitor_time_regularity(&only_one, &p, &radii).is_err());
    }

    #[test]
    fn pair_count_and_positive_ratio() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = GmnseParams::new(1.0, 10.0, 1e-3, random_field(&dom, &mut rng, 1.0)).unwrap();
        let u0 = random_field(&dom, &mut rng, 5.0);
        let tr = Stepper::new(p.clone())
            .evolve(&u0, 0.04, RecordingPlan::every(10).with_checkpoints(10))
            .unwrap();
        let rep = monitor_time_regularity(&tr, &p, &absorbing_radii(&p, 0.0)).unwrap();
        assert_eq!(rep.constant("pairs"), Some(10.0));
        assert!(rep.constant("rho3_hat").unwrap() > 0.0);
    }
}
