use crate::dynamics::{GmnseParams, TrajectoryRecord};

use super::{holds, violation_fraction, AbsorbingRadii, EstimateError, InequalityId, MonitorReport};

fn check_record(tr: &TrajectoryRecord, needed: usize) -> Result<(), EstimateError> {
    if tr.norm_series.len() != tr.times.len() || tr.fn_series.len() != tr.times.len() {
        return Err(EstimateError::MismatchedSeries(format!(
            "{} times, {} norm samples, {} F_N samples",
            tr.times.len(),
            tr.norm_series.len(),
            tr.fn_series.len()
        )));
    }
    if tr.times.len() < needed {
        return Err(EstimateError::InsufficientSamples {
            needed,
            found: tr.times.len(),
        });
    }
    Ok(())
}

/// Energy balance with its explicit constant:
///
/// `residual_n = (h²_{n+1} − h²_n)/Δt + ν v²_{n+1} − ‖f‖₂²/(νλ₁)`,
///
/// with `Δt` the spacing of consecutive recorded samples. Nothing is fitted.
pub fn monitor_energy(tr: &TrajectoryRecord, p: &GmnseParams) -> Result<MonitorReport, EstimateError> {
    check_record(tr, 2)?;
    let nu = p.nu();
    let rhs = p.forcing_h_norm_sq() / (nu * p.lambda1());
    let mut rep = MonitorReport::new(InequalityId::EnergyBalance);
    for n in 0..tr.len() - 1 {
        let (a, b) = (&tr.norm_series[n], &tr.norm_series[n + 1]);
        let dt = tr.times[n + 1] - tr.times[n];
        let lhs = (b.h_norm.powi(2) - a.h_norm.powi(2)) / dt + nu * b.v_norm.powi(2);
        rep.times.push(tr.times[n + 1]);
        rep.residual_series.push(lhs - rhs);
    }
    rep.violation_fraction = violation_fraction(rep.residual_series.iter().map(|r| (*r, rhs)));
    rep.set("rhs", rhs);
    rep.set("nu", nu);
    rep.set("lambda1", p.lambda1());
    rep.set("forcing_h_norm_sq", p.forcing_h_norm_sq());
    Ok(rep)
}

/// Entry into the `H`-ball `h² ≤ rho_h_sq` and the `V`-ball
/// `v² ≤ rho_v_sq_formula`, both up to the [`holds`] slack.
///
/// Residuals are `h² − rho_h_sq` at every sample followed by
/// `v² − rho_v_sq_formula` at every sample with `t ≥ τ₀ + 1`, `τ₀` the
/// measured `H` entry time. The violation fraction counts `H` samples after
/// entry and `V` samples from `τ₀ + 1` on. A trajectory that never enters
/// reports no `h_entry_time` constant and `h_entered = 0`.
pub fn monitor_absorbing(tr: &TrajectoryRecord, radii: &AbsorbingRadii) -> Result<MonitorReport, EstimateError> {
    check_record(tr, 1)?;
    let mut rep = MonitorReport::new(InequalityId::AbsorbingBalls);
    let (rh, rv) = (radii.rho_h_sq, radii.rho_v_sq_formula);
    rep.set("rho_h_sq", rh);
    rep.set("rho_v_sq", rv);
    rep.set("fitted_c", radii.fitted_c);
    rep.fitted_c = Some(radii.fitted_c);

    let h_res: Vec<f64> = tr.h_norm_sq().map(|h2| h2 - rh).collect();
    rep.times.extend_from_slice(&tr.times);
    rep.residual_series.extend_from_slice(&h_res);

    let entry = h_res.iter().position(|r| holds(*r, rh));
    let Some(entry) = entry else {
        rep.set("h_entered", 0.0);
        rep.set("h_remains", 0.0);
        rep.violation_fraction = 1.0;
        return Ok(rep);
    };
    let tau0 = tr.times[entry];
    let mut checked: Vec<(f64, f64)> = h_res[entry..].iter().map(|r| (*r, rh)).collect();
    let h_remains = checked.iter().all(|(r, rhs)| holds(*r, *rhs));
    rep.set("h_entered", 1.0);
    rep.set("h_entry_time", tau0);
    rep.set("h_remains", f64::from(u8::from(h_remains)));

    let v_start = tau0 + 1.0;
    rep.set("v_check_start", v_start);
    let mut v_bad = 0usize;
    let mut v_total = 0usize;
    for (t, nt) in tr.times.iter().zip(&tr.norm_series) {
        if *t < v_start - 1e-12 {
            continue;
        }
        let r = nt.v_norm.powi(2) - rv;
        rep.times.push(*t);
        rep.residual_series.push(r);
        checked.push((r, rv));
        v_total += 1;
        if !holds(r, rv) {
            v_bad += 1;
        }
    }
    if let Some(i) = tr.norm_series.iter().position(|nt| holds(nt.v_norm.powi(2) - rv, rv)) {
        rep.set("v_entry_time", tr.times[i]);
    }
    rep.set("v_samples_checked", v_total as f64);
    rep.set(
        "v_violation_fraction",
        if v_total == 0 { 0.0 } else { v_bad as f64 / v_total as f64 },
    );
    rep.violation_fraction = violation_fraction(checked);
    Ok(rep)
}

fn enstrophy_lhs(tr: &TrajectoryRecord, nu: f64) -> Vec<(f64, f64, f64)> {
    (0..tr.len() - 1)
        .map(|n| {
            let (a, b) = (&tr.norm_series[n], &tr.norm_series[n + 1]);
            let dt = tr.times[n + 1] - tr.times[n];
            let lhs = (b.v_norm.powi(2) - a.v_norm.powi(2)) / dt + nu * b.a_norm.powi(2);
            (tr.times[n + 1], lhs, a.v_norm.powi(2))
        })
        .collect()
}

/// Enstrophy balance `(v²_{n+1} − v²_n)/Δt + ν a²_{n+1} ≤ (2/ν)‖f‖₂² + C N⁴ v²_n`
/// with the smallest `C ≥ 0` that makes every sample hold exactly (no slack
/// in the fit; the slack only enters the violation fraction).
pub fn monitor_enstrophy(tr: &TrajectoryRecord, p: &GmnseParams) -> Result<MonitorReport, EstimateError> {
    monitor_enstrophy_family(std::slice::from_ref(tr), p)
}

/// [`monitor_enstrophy`] with one constant fitted over several trajectories.
/// Adding trajectories can only increase the fitted constant.
pub fn monitor_enstrophy_family(trs: &[TrajectoryRecord], p: &GmnseParams) -> Result<MonitorReport, EstimateError> {
    if trs.is_empty() {
        return Err(EstimateError::InsufficientSamples { needed: 1, found: 0 });
    }
    for tr in trs {
        check_record(tr, 2)?;
    }
    let nu = p.nu();
    let f_term = 2.0 / nu * p.forcing_h_norm_sq();
    let n4 = p.n_cap().powi(4);
    let samples: Vec<(f64, f64, f64)> = trs.iter().flat_map(|tr| enstrophy_lhs(tr, nu)).collect();

    let mut c_hat = 0.0_f64;
    for &(_, lhs, v2) in &samples {
        let excess = lhs - f_term;
        if excess <= 0.0 {
            continue;
        }
        c_hat = if v2 > 0.0 {
            c_hat.max(excess / (n4 * v2))
        } else {
            f64::INFINITY
        };
    }

    let mut rep = MonitorReport::new(InequalityId::EnstrophyBalance);
    let mut pairs = Vec::with_capacity(samples.len());
    for &(t, lhs, v2) in &samples {
        let c_term = if v2 == 0.0 { 0.0 } else { c_hat * n4 * v2 };
        let rhs = f_term + c_term;
        rep.times.push(t);
        rep.residual_series.push(lhs - rhs);
        pairs.push((lhs - rhs, rhs));
    }
    rep.violation_fraction = violation_fraction(pairs);
    rep.fitted_c = Some(c_hat);
    rep.set("forcing_term", f_term);
    rep.set("n_cap_pow4", n4);
    rep.set("trajectories", trs.len() as f64);
    Ok(rep)
}
