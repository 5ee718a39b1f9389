use std::time::{SystemTime, UNIX_EPOCH};

use gmnse::attractor::{
    approximate_attractor, box_counting_dimension, dyadic_scales, evolve_ensemble, fit_attraction_rate,
    hausdorff_semidistance, project_ensemble, EnsembleLabel, EnsembleState, NormKind,
};
use gmnse::dynamics::{GmnseParams, RecordingPlan, Stepper, TrajectoryRecord};
use gmnse::estimates::{
    absorbing_radii, burn_in, holds, monitor_absorbing, monitor_energy, monitor_enstrophy_family, monitor_lipschitz,
    monitor_smoothing, monitor_time_regularity, rho3_formula, BurnIn, MonitorReport,
};
use gmnse::spectral::{norms, random_field, random_field_with, RandomSpectrum, SpectralVelocityField, TorusDomain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{Outputs, RunManifest};
use crate::{CliError, Experiment, ExperimentConfig};

/// Checkpoint cadence of the time-regularity experiment when none is set.
const DEFAULT_REGULARITY_CHECKPOINTS: usize = 100;

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Seeded divergence-free initial data with the default `|k|^{-2}` spectrum.
pub(crate) fn initial_state(dom: &TorusDomain, seed: u64, h_norm: f64) -> SpectralVelocityField {
    random_field(dom, &mut ChaCha8Rng::seed_from_u64(seed), h_norm)
}

/// Rough perturbation of size `h_norm`: flat spectrum over every
/// dealiased mode, so most of its energy sits at high wavenumbers. Drawn
/// from a stream independent of [`initial_state`].
pub(crate) fn rough_perturbation(dom: &TorusDomain, seed: u64, h_norm: f64) -> SpectralVelocityField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let flat = RandomSpectrum {
        decay: 0.0,
        ..RandomSpectrum::default()
    };
    random_field_with(dom, &mut rng, h_norm, flat)
}

/// Runs the configured experiment into `config.output_dir`.
///
/// Outputs depend only on the configuration. On error the manifest is
/// still written, flagged `partial`, and the error is returned.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let started_at = unix_now();
    let warnings = config.validate()?;
    let (params, _) = config.build_params()?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut out = Outputs::create(&config.output_dir)?;
    out.write_text("config.toml", &config.to_toml_string())?;
    log::info!(
        "{} on {}^{} (ν = {}, N = {}, dt = {}) into {}",
        config.experiment,
        params.domain().resolution(),
        params.domain().dimension(),
        params.nu(),
        params.n_cap(),
        params.dt(),
        out.root().display()
    );
    let result = match config.experiment {
        Experiment::Simulate => simulate(config, &params, &mut out),
        Experiment::VerifyEstimates => verify_estimates(config, &params, &mut out),
        Experiment::Attractor => attractor(config, &params, &mut out).map(|_| ()),
        Experiment::Dimension => dimension(config, &params, &mut out),
        Experiment::Smoothing => smoothing(config, &params, &mut out),
        Experiment::TimeRegularity => time_regularity(config, &params, &mut out),
        Experiment::RateFit => rate_fit(config, &params, &mut out),
    };
    let manifest = RunManifest {
        format: "gmnse-run".into(),
        experiment: config.experiment,
        config_hash: config.hash(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        started_at,
        finished_at: unix_now(),
        files: out.files().to_vec(),
        partial: result.is_err(),
        error: result.as_ref().err().map(|e| e.to_string()),
    };
    out.write_manifest(&manifest)?;
    result.map(|_| manifest)
}

fn plan(config: &ExperimentConfig) -> RecordingPlan {
    let p = RecordingPlan::every(config.run.record_every);
    match config.run.checkpoint_every {
        Some(c) => p.with_checkpoints(c),
        None => p,
    }
}

fn write_checkpoints(out: &mut Outputs, dir: &str, tr: &TrajectoryRecord) -> Result<(), CliError> {
    for (t, u) in &tr.checkpoints {
        let step = (t / tr.dt).round() as u64;
        out.write_field(&format!("{dir}/step_{step:08}.field"), u)?;
    }
    Ok(())
}

fn simulate(config: &ExperimentConfig, p: &GmnseParams, out: &mut Outputs) -> Result<(), CliError> {
    let stepper = Stepper::new(p.clone());
    for &seed in &config.seeds {
        let u0 = initial_state(p.domain(), seed, config.run.initial_h_norm);
        let tr = stepper.evolve(&u0, config.run.t_final, plan(config))?;
        out.write_series(&format!("series_seed{seed}.csv"), &tr)?;
        out.write_field(&format!("final_seed{seed}.field"), &tr.final_state)?;
        write_checkpoints(out, &format!("checkpoints_seed{seed}"), &tr)?;
    }
    Ok(())
}

/// Accumulates `inequality_id,label,time,residual` rows.
#[derive(Default)]
struct Residuals(Vec<[String; 4]>);

impl Residuals {
    fn add(&mut self, label: &str, rep: &MonitorReport) {
        for (t, r) in rep.times.iter().zip(&rep.residual_series) {
            self.0.push([
                rep.inequality_id.as_str().to_owned(),
                label.to_owned(),
                t.to_string(),
                r.to_string(),
            ]);
        }
    }

    fn write(self, out: &mut Outputs) -> Result<(), CliError> {
        out.write_csv("residuals.csv", &["inequality_id", "label", "time", "residual"], self.0)
    }
}

fn summary(label: &str, rep: &MonitorReport) -> Value {
    let mut v = rep.to_summary_json();
    v["label"] = json!(label);
    v
}

fn verify_estimates(config: &ExperimentConfig, p: &GmnseParams, out: &mut Outputs) -> Result<(), CliError> {
    let stepper = Stepper::new(p.clone());
    let mut records = Vec::new();
    for &seed in &config.seeds {
        let u0 = initial_state(p.domain(), seed, config.run.initial_h_norm);
        let tr = stepper.evolve(&u0, config.run.t_final, plan(config))?;
        out.write_series(&format!("series_seed{seed}.csv"), &tr)?;
        records.push((seed, tr));
    }
    let trs: Vec<TrajectoryRecord> = records.iter().map(|(_, tr)| tr.clone()).collect();
    let enstrophy = monitor_enstrophy_family(&trs, p)?;
    let c_hat = enstrophy.fitted_c.unwrap_or(0.0);
    let radii = absorbing_radii(p, c_hat);

    let mut reports = vec![summary("all-seeds", &enstrophy)];
    let mut residuals = Residuals::default();
    residuals.add("all-seeds", &enstrophy);
    for (seed, tr) in &records {
        let label = format!("seed{seed}");
        let energy = monitor_energy(tr, p)?;
        let absorbing = monitor_absorbing(tr, &radii)?;
        let mut seed_reports = vec![energy, absorbing];
        if tr.checkpoints.len() >= 2 {
            seed_reports.push(monitor_time_regularity(tr, p, &radii)?);
        }
        for rep in &seed_reports {
            residuals.add(&label, rep);
            reports.push(summary(&label, rep));
        }
    }
    residuals.write(out)?;
    out.write_json(
        "reports.json",
        &json!({
            "experiment": "verify-estimates",
            "radii": radii,
            "h_entry_time_bounds": records
                .iter()
                .map(|(seed, tr)| json!({
                    "label": format!("seed{seed}"),
                    "bound": radii.h_entry_time_bound(tr.norm_series[0].h_norm.powi(2)),
                }))
                .collect::<Vec<_>>(),
            "reports": reports,
        }),
    )
}

/// Burns in every seed and returns the certified states together with the
/// largest fitted enstrophy constant (the constant of the seed family).
fn burn_in_seeds(config: &ExperimentConfig, p: &GmnseParams) -> Result<(Vec<BurnIn>, f64), CliError> {
    let mut out = Vec::with_capacity(config.seeds.len());
    let mut c_hat = 0.0_f64;
    for &seed in &config.seeds {
        let u0 = initial_state(p.domain(), seed, config.run.initial_h_norm);
        let b = burn_in(&u0, p, config.run.t_burn_in, config.run.record_every)?;
        log::info!(
            "seed {seed}: absorbed, V-ball checked from t = {}, Ĉ = {:e}",
            b.certified_from,
            b.radii.fitted_c
        );
        c_hat = c_hat.max(b.radii.fitted_c);
        out.push(b);
    }
    Ok((out, c_hat))
}

struct AttractorSample {
    ensemble: EnsembleState,
    c_hat: f64,
}

fn attractor(config: &ExperimentConfig, p: &GmnseParams, out: &mut Outputs) -> Result<AttractorSample, CliError> {
    let (burned, c_hat) = burn_in_seeds(config, p)?;
    let seed_set = EnsembleState::new(burned.into_iter().map(|b| b.state).collect(), EnsembleLabel::InitialSet)?;
    let r = &config.run;
    let ensemble = approximate_attractor(&seed_set, p, 0.0, r.t_sample, r.n_snapshots)?;
    let radii = absorbing_radii(p, c_hat);

    let mut rows = Vec::with_capacity(ensemble.len());
    let (mut max_h_sq, mut max_v_sq) = (0.0_f64, 0.0_f64);
    for (i, m) in ensemble.members().iter().enumerate() {
        let n = norms(m);
        max_h_sq = max_h_sq.max(n.h_norm.powi(2));
        max_v_sq = max_v_sq.max(n.v_norm.powi(2));
        rows.push([i as f64, n.h_norm, n.v_norm, n.a_norm]);
    }
    out.write_csv("snapshot_norms.csv", &["member", "h_norm", "v_norm", "a_norm"], rows)?;
    out.write_ensemble("attractor", &ensemble, &p.fingerprint())?;

    // every other snapshot of each member, to gauge sampling convergence
    let per_member = r.n_snapshots;
    let half: Vec<SpectralVelocityField> = ensemble
        .members()
        .iter()
        .enumerate()
        .filter(|(i, _)| (i % per_member).is_multiple_of(2))
        .map(|(_, m)| m.clone())
        .collect();
    let half = EnsembleState::new(half, EnsembleLabel::AttractorApprox)?;
    let sampling_gap = hausdorff_semidistance(&ensemble, &half, NormKind::H)?;
    let shift = r.t_sample / r.n_snapshots as f64;
    let invariance_gap = hausdorff_semidistance(&evolve_ensemble(&ensemble, p, shift)?, &ensemble, NormKind::H)?;

    out.write_json(
        "reports.json",
        &json!({
            "experiment": config.experiment.name(),
            "attractor": {
                "member_count": ensemble.len(),
                "snapshots_per_seed": per_member,
                "max_h_norm_sq": max_h_sq,
                "max_v_norm_sq": max_v_sq,
                "inside_h_ball": holds(max_h_sq - radii.rho_h_sq, radii.rho_h_sq),
                "inside_v_ball": holds(max_v_sq - radii.rho_v_sq_formula, radii.rho_v_sq_formula),
                "semidistance_full_to_half": sampling_gap,
                "semidistance_shifted_to_self": invariance_gap,
                "shift": shift,
            },
            "radii": radii,
        }),
    )?;
    Ok(AttractorSample { ensemble, c_hat })
}

fn dimension(config: &ExperimentConfig, p: &GmnseParams, out: &mut Outputs) -> Result<(), CliError> {
    let sample = attractor(config, p, out)?;
    let e = &sample.ensemble;
    let widest = *config.run.projection_dims.iter().max().expect("validated nonempty");
    let scales = dyadic_scales(&project_ensemble(e, widest), config.run.box_levels);
    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    for &dim in &config.run.projection_dims {
        let est = box_counting_dimension(e, dim, &scales)?;
        for (s, c) in est.scales.iter().zip(&est.counts) {
            rows.push([dim as f64, *s, *c as f64, -s.ln(), (*c as f64).ln()]);
        }
        estimates.push(est);
    }
    out.write_csv(
        "box_counts.csv",
        &["projection_dim", "scale", "count", "log_inv_scale", "log_count"],
        rows,
    )?;
    out.write_json(
        "dimension.json",
        &json!({
            "member_count": e.len(),
            "fitted_c": sample.c_hat,
            "estimates": estimates,
        }),
    )
}

fn smoothing(config: &ExperimentConfig, p: &GmnseParams, out: &mut Outputs) -> Result<(), CliError> {
    let seed = config.seeds[0];
    let u0 = initial_state(p.domain(), seed, config.run.initial_h_norm);
    let b = burn_in(&u0, p, config.run.t_burn_in, config.run.record_every)?;
    let mut residuals = Residuals::default();
    let mut reports = vec![summary("burn-in", &b.absorbing)];
    let mut rows = Vec::new();
    for &eps in &config.run.perturbations {
        let w0 = rough_perturbation(p.domain(), seed, eps);
        let shifted = &b.state + &w0;
        let label = format!("perturbation{eps:e}");
        let lip = monitor_lipschitz(&b.state, &shifted, p, config.run.t_pair)?;
        let sm = monitor_smoothing(&b.state, &shifted, p, config.run.t_pair)?;
        let (r1, r2) = (
            sm.constant("rho1_hat").unwrap_or(f64::NAN),
            sm.constant("rho2_hat").unwrap_or(f64::NAN),
        );
        for (t, res) in sm.times.iter().zip(&sm.residual_series) {
            let env = r1 * (r2 * t).exp();
            rows.push([eps, *t, res + env, env]);
        }
        residuals.add(&label, &lip);
        residuals.add(&label, &sm);
        reports.push(summary(&label, &lip));
        reports.push(summary(&label, &sm));
    }
    out.write_csv("smoothing_series.csv", &["perturbation", "time", "ratio", "envelope"], rows)?;
    residuals.write(out)?;
    out.write_json(
        "reports.json",
        &json!({
            "experiment": "smoothing",
            "burn_in_certified_from": b.certified_from,
            "radii": b.radii,
            "reports": reports,
        }),
    )
}

fn time_regularity(config: &ExperimentConfig, p: &GmnseParams, out: &mut Outputs) -> Result<(), CliError> {
    let seed = config.seeds[0];
    let u0 = initial_state(p.domain(), seed, config.run.initial_h_norm);
    let b = burn_in(&u0, p, config.run.t_burn_in, config.run.record_every)?;
    let every = config.run.checkpoint_every.unwrap_or(DEFAULT_REGULARITY_CHECKPOINTS);
    let tr = Stepper::new(p.clone()).evolve(
        &b.state,
        config.run.t_final,
        RecordingPlan::every(config.run.record_every).with_checkpoints(every),
    )?;
    out.write_series(&format!("series_seed{seed}.csv"), &tr)?;
    let rep = monitor_time_regularity(&tr, p, &b.radii)?;
    let rows = rep.times.iter().zip(&rep.residual_series).map(|(s, r)| {
        let bound = rho3_formula(*s, p, &b.radii);
        [*s, r + bound, bound]
    });
    out.write_csv("time_regularity_pairs.csv", &["separation", "ratio", "bound"], rows)?;
    let mut residuals = Residuals::default();
    residuals.add("after-burn-in", &rep);
    residuals.write(out)?;
    out.write_json(
        "reports.json",
        &json!({
            "experiment": "time-regularity",
            "burn_in": config.run.t_burn_in,
            "radii": b.radii,
            "reports": [summary("after-burn-in", &rep)],
        }),
    )
}

fn rate_fit(config: &ExperimentConfig, p: &GmnseParams, out: &mut Outputs) -> Result<(), CliError> {
    let sample = attractor(config, p, out)?;
    let candidate = sample.ensemble.with_label(EnsembleLabel::ExpAttractorCandidate);
    let members = config
        .seeds
        .iter()
        .map(|&s| initial_state(p.domain(), s, config.run.initial_h_norm))
        .collect();
    let b = EnsembleState::new(members, EnsembleLabel::InitialSet)?;
    let fit = fit_attraction_rate(&b, &candidate, p, &config.run.rate_times)?;
    out.write_csv("distance_vs_time.csv", &["time", "distance"], fit.samples.iter().map(|(t, d)| [*t, *d]))?;
    out.write_json(
        "rate_fit.json",
        &json!({
            "q_factor": fit.q_factor,
            "rate": if fit.rate.is_finite() { json!(fit.rate) } else { json!("inf") },
            "goodness": fit.goodness,
            "converged": fit.converged,
            "accepted": fit.accepted(),
            "candidate_size": candidate.len(),
        }),
    )
}
