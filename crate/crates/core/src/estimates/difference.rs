use crate::dynamics::{GmnseParams, Stepper};
use crate::regression::fit_line;
use crate::spectral::{norms, NormTriple, SpectralVelocityField};

use super::{violation_fraction, EstimateError, InequalityId, MonitorReport};

/// Smoothing fits use samples with `t̄ ≥ min(SMOOTHING_FIT_START, t_final/2)`.
pub const SMOOTHING_FIT_START: f64 = 1.0;
/// Earliest time at which the `V`-norm of the difference is inspected.
const SMOOTHING_PROBE_START: f64 = 0.1;

/// Norms of `w(t) = S(t)u0a − S(t)u0b`, recorded at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub times: Vec<f64>,
    pub diff_norms: Vec<NormTriple>,
}

impl PairRecord {
    /// `∫₀^{t_n} ‖w‖² ds` by the trapezoid rule on the recorded samples.
    pub fn v_integral(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.times.len());
        out.push(0.0);
        for n in 1..self.times.len() {
            let a = self.diff_norms[n - 1].v_norm.powi(2);
            let b = self.diff_norms[n].v_norm.powi(2);
            acc += 0.5 * (a + b) * (self.times[n] - self.times[n - 1]);
            out.push(acc);
        }
        out
    }
}

/// Evolves both initial data with the same stepper and records the
/// difference norms every step.
pub fn evolve_pair(
    u0a: &SpectralVelocityField,
    u0b: &SpectralVelocityField,
    p: &GmnseParams,
    t_final: f64,
) -> Result<PairRecord, EstimateError> {
    if u0a.domain() != u0b.domain() {
        return Err(EstimateError::DomainMismatch);
    }
    let stepper = Stepper::new(p.clone());
    let n_steps = p.steps_for(t_final)?;
    let (mut a, mut b) = (u0a.clone(), u0b.clone());
    let mut rec = PairRecord {
        times: vec![0.0],
        diff_norms: vec![norms(&(&a - &b))],
    };
    for s in 1..=n_steps {
        a = stepper.step_indexed(&a, s)?.0;
        b = stepper.step_indexed(&b, s)?.0;
        rec.times.push(s as f64 * p.dt());
        rec.diff_norms.push(norms(&(&a - &b)));
    }
    Ok(rec)
}

/// Continuous dependence `‖w(t)‖₂² + ν∫₀ᵗ‖w‖² ≤ e^{C N⁴ t}‖w(0)‖₂²`.
///
/// The inequality is homogeneous in `w`, so residuals are reported relative
/// to `‖w(0)‖₂²`. The fitted constant is the least `C ≥ 0` for which every
/// sample holds exactly. Equal initial data give `C = 0` and zero residuals.
pub fn monitor_lipschitz(
    u0a: &SpectralVelocityField,
    u0b: &SpectralVelocityField,
    p: &GmnseParams,
    t_final: f64,
) -> Result<MonitorReport, EstimateError> {
    let rec = evolve_pair(u0a, u0b, p, t_final)?;
    let mut rep = MonitorReport::new(InequalityId::DifferenceLipschitz);
    let w0_sq = rec.diff_norms[0].h_norm.powi(2);
    let n4 = p.n_cap().powi(4);
    rep.set("w0_h_norm", w0_sq.sqrt());
    if w0_sq == 0.0 {
        rep.times = rec.times;
        rep.residual_series = vec![0.0; rep.times.len()];
        rep.fitted_c = Some(0.0);
        return Ok(rep);
    }
    let integral = rec.v_integral();
    let ratios: Vec<f64> = rec
        .diff_norms
        .iter()
        .zip(&integral)
        .map(|(w, int)| (w.h_norm.powi(2) + p.nu() * int) / w0_sq)
        .collect();
    let mut c_hat = 0.0_f64;
    for (t, r) in rec.times.iter().zip(&ratios) {
        if *t > 0.0 && *r > 1.0 {
            c_hat = c_hat.max(r.ln() / (n4 * t));
        }
    }
    let mut pairs = Vec::with_capacity(ratios.len());
    for (t, r) in rec.times.iter().zip(&ratios) {
        let rhs = (c_hat * n4 * t).exp();
        rep.times.push(*t);
        rep.residual_series.push(r - rhs);
        pairs.push((r - rhs, rhs));
    }
    rep.violation_fraction = violation_fraction(pairs);
    rep.fitted_c = Some(c_hat);
    rep.set("max_ratio", ratios.iter().copied().fold(0.0, f64::max));
    rep.set("t_final", rec.times.last().copied().unwrap_or(0.0));
    Ok(rep)
}

/// Smoothing envelope `R(t̄) = t̄‖w(t̄)‖² / ‖w(0)‖₂² ≤ ϱ₁ e^{ϱ₂ t̄}`.
///
/// `t̄` is the time since the common start of the pair; callers burn both
/// initial data into the `V` absorbing ball first. On samples with
/// `t̄ ≥ min(1, t_final/2)` a least-squares line through `(t̄, ln R)` gives
/// `ϱ̂₂`; `ϱ̂₁` is then the least prefactor with `R ≤ ϱ̂₁ e^{ϱ̂₂ t̄}` on that
/// window. Residuals `R − envelope` are reported on the fit window.
///
/// Constants also record the extremes of `‖w‖` over `t̄ ≥ 0.1` and the
/// ratio `‖w‖²/‖w‖₂²` at the start and end, which exposes how much
/// regularity the difference gains.
pub fn monitor_smoothing(
    u0a: &SpectralVelocityField,
    u0b: &SpectralVelocityField,
    p: &GmnseParams,
    t_final: f64,
) -> Result<MonitorReport, EstimateError> {
    if u0a == u0b {
        return Err(EstimateError::IdenticalInitialData);
    }
    let rec = evolve_pair(u0a, u0b, p, t_final)?;
    let w0_sq = rec.diff_norms[0].h_norm.powi(2);
    if w0_sq == 0.0 {
        return Err(EstimateError::IdenticalInitialData);
    }
    let t_end = rec.times.last().copied().unwrap_or(0.0);
    let fit_start = SMOOTHING_FIT_START.min(t_end / 2.0);
    let window: Vec<(f64, f64)> = rec
        .times
        .iter()
        .zip(&rec.diff_norms)
        .filter(|(t, _)| **t > 0.0 && **t >= fit_start - 1e-12)
        .map(|(t, w)| (*t, t * w.v_norm.powi(2) / w0_sq))
        .filter(|(_, r)| *r > 0.0)
        .collect();
    let ts: Vec<f64> = window.iter().map(|(t, _)| *t).collect();
    let logs: Vec<f64> = window.iter().map(|(_, r)| r.ln()).collect();
    let fit = fit_line(&ts, &logs).ok_or(EstimateError::InsufficientSamples {
        needed: 2,
        found: ts.len(),
    })?;
    let rho2 = fit.slope;
    let rho1 = window
        .iter()
        .map(|(t, r)| r * (-rho2 * t).exp())
        .fold(0.0, f64::max);

    let mut rep = MonitorReport::new(InequalityId::Smoothing);
    let mut pairs = Vec::with_capacity(window.len());
    for (t, r) in &window {
        let env = rho1 * (rho2 * t).exp();
        rep.times.push(*t);
        rep.residual_series.push(r - env);
        pairs.push((r - env, env));
    }
    rep.violation_fraction = violation_fraction(pairs);
    rep.set("rho1_hat", rho1);
    rep.set("rho2_hat", rho2);
    if let Some(g) = fit.r_squared {
        rep.set("fit_r_squared", g);
    }
    rep.set("fit_start", fit_start);
    rep.set("w0_h_norm", w0_sq.sqrt());

    let probe: Vec<f64> = rec
        .times
        .iter()
        .zip(&rec.diff_norms)
        .filter(|(t, _)| **t >= SMOOTHING_PROBE_START - 1e-12)
        .map(|(_, w)| w.v_norm)
        .collect();
    if !probe.is_empty() {
        rep.set("w_v_norm_min_after_probe", probe.iter().copied().fold(f64::INFINITY, f64::min));
        rep.set("w_v_norm_max_after_probe", probe.iter().copied().fold(0.0, f64::max));
    }
    let ratio = |w: &NormTriple| {
        if w.h_norm == 0.0 {
            0.0
        } else {
            (w.v_norm / w.h_norm).powi(2)
        }
    };
    rep.set("v_h_ratio_initial", ratio(&rec.diff_norms[0]));
    rep.set("v_h_ratio_final", ratio(rec.diff_norms.last().unwrap()));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{leray_project, random_field, TorusDomain, VectorCoefficients};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eigenmode(dom: TorusDomain, a: f64) -> SpectralVelocityField {
        let z = Complex64::new(0.0, 0.0);
        let mut raw = VectorCoefficients::zeros(dom);
        raw.set_real_mode([0, 0, 1], [Complex64::new(a, 0.0), z, z]).unwrap();
        leray_project(&raw)
    }

    #[test]
    fn trapezoid_integral_of_decaying_mode() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-3).unwrap();
        let rec = evolve_pair(&eigenmode(dom, 2.0), &eigenmode(dom, 1.0), &p, 0.5).unwrap();
        // ‖w‖² = v0² e^{−2t} for a λ₁ eigenmode
        let v0 = rec.diff_norms[0].v_norm.powi(2);
        let exact = v0 * (1.0 - (-1.0_f64).exp()) / 2.0;
        let got = *rec.v_integral().last().unwrap();
        assert!((got - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn equal_data_give_zero_constant() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_field(&dom, &mut rng, 5.0);
        let p = GmnseParams::new(1.0, 10.0, 1e-3, random_field(&dom, &mut rng, 1.0)).unwrap();
        let rep = monitor_lipschitz(&u, &u, &p, 0.05).unwrap();
        assert_eq!(rep.fitted_c, Some(0.0));
        assert!(rep.residual_series.iter().all(|r| *r == 0.0));
        assert!(matches!(
            monitor_smoothing(&u, &u, &p, 0.05),
            Err(EstimateError::IdenticalInitialData)
        ));
    }

    #[test]
    fn linear_eigenmode_difference() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-3).unwrap();
        let (a, b) = (eigenmode(dom, 0.02), eigenmode(dom, 0.01));
        let lip = monitor_lipschitz(&a, &b, &p, 1.0).unwrap();
        assert_eq!(lip.fitted_c, Some(0.0));
        assert_eq!(lip.violation_fraction, 0.0);

        let sm = monitor_smoothing(&a, &b, &p, 2.0).unwrap();
        // R(t) = t λ₁ e^{−2νλ₁ t}
        for (t, r) in sm.times.iter().zip(&sm.residual_series) {
            let env = sm.constant("rho1_hat").unwrap() * (sm.constant("rho2_hat").unwrap() * t).exp();
            let exact = t * (-2.0 * t).exp();
            assert!(((r + env) - exact).abs() < 1e-9);
            assert!(*r <= 1e-12);
        }
        assert!((sm.constant("v_h_ratio_final").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fitted_lipschitz_constant_is_minimal() {
        let dom = TorusDomain::periodic_cube(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = GmnseParams::new(1.0, 10.0, 1e-3, random_field(&dom, &mut rng, 1.0)).unwrap();
        let a = random_field(&dom, &mut rng, 40.0);
        let b = a.axpy(1.0, &random_field(&dom, &mut rng, 1e-2));
        let rep = monitor_lipschitz(&a, &b, &p, 0.2).unwrap();
        let c = rep.fitted_c.unwrap();
        assert!(rep.residual_series.iter().all(|r| *r <= 1e-12));
        if c > 0.0 {
            let n4 = p.n_cap().powi(4);
            let violated = rep
                .times
                .iter()
                .zip(&rep.residual_series)
                .any(|(t, r)| r + (c * n4 * t).exp() > (0.99 * c * n4 * t).exp());
            assert!(violated);
        }
    }
}
