use num_complex::Complex64;

use crate::spectral::{dealias, norms, stokes_apply, NormTriple, SpectralVelocityField};

use super::{f_n_factor, Advection, DynamicsError, GmnseParams};

/// Safety factor in the advective step-size heuristic `dt ≤ c·h/max|F_N u|`.
pub const CFL_FACTOR: f64 = 0.25;

/// `P f − ν A u − F_N(‖u‖)·P[(u·∇)u]`.
pub fn rhs(u: &SpectralVelocityField, p: &GmnseParams) -> SpectralVelocityField {
    let fn_value = f_n_factor(norms(u).v_norm, p.n_cap());
    let adv = Advection::new(*u.domain()).evaluate(u).term;
    p.forcing().axpy(-p.nu(), &stokes_apply(u)).axpy(-fn_value, &adv)
}

/// Per-step diagnostics, measured on the state the step started from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub norms: NormTriple,
    pub fn_value: f64,
    pub max_speed: f64,
}

/// First-order integrating-factor IMEX scheme:
///
/// `û^{n+1}_k = e^{−ν λ_k dt} (û^n_k + dt·[P f − F_N(‖u^n‖) P((u^n·∇)u^n)]_k)`
///
/// Viscous decay is exact per mode; forcing and modulated advection are
/// explicit with `F_N` sampled at the start of the step. Every output
/// lives on the dealiased modes.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: GmnseParams,
    advection: Advection,
    decay: Vec<f64>,
}

impl Stepper {
    pub fn new(params: GmnseParams) -> Self {
        let dom = *params.domain();
        let decay = dom
            .wavevectors()
            .map(|(_, k)| (-params.nu() * dom.stokes_eigenvalue(k) * params.dt()).exp())
            .collect();
        Self {
            advection: Advection::new(dom),
            params,
            decay,
        }
    }

    pub fn params(&self) -> &GmnseParams {
        &self.params
    }

    /// Advances one step. `step_index` only labels a blow-up error.
    pub fn step_indexed(
        &self,
        u: &SpectralVelocityField,
        step_index: usize,
    ) -> Result<(SpectralVelocityField, StepInfo), DynamicsError> {
        let p = &self.params;
        if u.domain() != p.domain() {
            return Err(DynamicsError::DomainMismatch);
        }
        let before = norms(u);
        let fn_value = f_n_factor(before.v_norm, p.n_cap());
        let adv = self.advection.evaluate(u);
        let dom = *p.domain();
        let n = dom.n_points();
        let dt = p.dt();
        let u0 = u.coefficients();
        let f = p.forcing().coefficients();
        let b = adv.term.coefficients();
        let mut next = vec![Complex64::new(0.0, 0.0); u0.len()];
        for c in 0..dom.dimension() {
            for i in 0..n {
                let s = c * n + i;
                next[s] = (u0[s] + (f[s] - b[s] * fn_value) * dt) * self.decay[i];
            }
        }
        let next = dealias(&SpectralVelocityField::from_data_unchecked(dom, next));
        let after = norms(&next);
        if !after.is_finite() {
            return Err(DynamicsError::BlowUp {
                step: step_index,
                time: step_index as f64 * dt,
            });
        }
        Ok((
            next,
            StepInfo {
                norms: before,
                fn_value,
                max_speed: adv.max_speed,
            },
        ))
    }

    pub fn step(&self, u: &SpectralVelocityField) -> Result<SpectralVelocityField, DynamicsError> {
        self.step_indexed(u, 1).map(|(v, _)| v)
    }

    /// `S(n_steps·dt) u0` without recording.
    pub fn advance(&self, u0: &SpectralVelocityField, n_steps: usize) -> Result<SpectralVelocityField, DynamicsError> {
        check_finite(u0)?;
        let mut u = u0.clone();
        for s in 1..=n_steps {
            u = self.step_indexed(&u, s)?.0;
        }
        Ok(u)
    }

    /// Whether `dt` satisfies the step-size heuristic for this state.
    pub fn cfl_ok(&self, info: &StepInfo) -> bool {
        let speed = info.fn_value * info.max_speed;
        speed == 0.0 || self.params.dt() <= CFL_FACTOR * self.params.domain().grid_spacing() / speed
    }

    pub fn evolve(
        &self,
        u0: &SpectralVelocityField,
        t_final: f64,
        plan: RecordingPlan,
    ) -> Result<TrajectoryRecord, DynamicsError> {
        let p = &self.params;
        let n_steps = p.steps_for(t_final)?;
        let every = plan.record_every.max(1);
        check_finite(u0)?;
        let mut rec = TrajectoryRecord {
            dt: p.dt(),
            times: Vec::new(),
            norm_series: Vec::new(),
            fn_series: Vec::new(),
            checkpoints: Vec::new(),
            final_state: u0.clone(),
        };
        let mut u = u0.clone();
        let mut warned = false;
        rec.push_sample(0.0, &u, p.n_cap());
        if plan.checkpoint_every.is_some() {
            rec.checkpoints.push((0.0, u.clone()));
        }
        for s in 1..=n_steps {
            let (next, info) = self.step_indexed(&u, s)?;
            if !warned && !self.cfl_ok(&info) {
                log::warn!(
                    "dt = {} exceeds the step-size heuristic at step {s} (max speed {:.3e}, F_N {:.3e})",
                    p.dt(),
                    info.max_speed,
                    info.fn_value
                );
                warned = true;
            }
            u = next;
            let t = s as f64 * p.dt();
            if s % every == 0 || s == n_steps {
                rec.push_sample(t, &u, p.n_cap());
            }
            if plan.checkpoint_every.is_some_and(|c| s % c.max(1) == 0) {
                rec.checkpoints.push((t, u.clone()));
            }
        }
        rec.final_state = u;
        Ok(rec)
    }
}

fn check_finite(u: &SpectralVelocityField) -> Result<(), DynamicsError> {
    if norms(u).is_finite() {
        Ok(())
    } else {
        Err(DynamicsError::BlowUp { step: 0, time: 0.0 })
    }
}

/// One IMEX step of the GMNSE. Deterministic: equal inputs give equal bits.
pub fn step(u: &SpectralVelocityField, p: &GmnseParams) -> Result<SpectralVelocityField, DynamicsError> {
    Stepper::new(p.clone()).step(u)
}

/// Which steps of a run are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordingPlan {
    /// Norms are recorded every this many steps (and at the last step).
    pub record_every: usize,
    /// Full fields are kept every this many steps, starting at step 0.
    pub checkpoint_every: Option<usize>,
}

impl RecordingPlan {
    pub fn every(record_every: usize) -> Self {
        Self {
            record_every,
            checkpoint_every: None,
        }
    }

    pub fn with_checkpoints(mut self, every: usize) -> Self {
        self.checkpoint_every = Some(every);
        self
    }
}

/// Recorded trajectory `t ↦ S(t)u₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub dt: f64,
    pub times: Vec<f64>,
    pub norm_series: Vec<NormTriple>,
    /// `F_N(‖u(t)‖)` at each recorded time.
    pub fn_series: Vec<f64>,
    pub checkpoints: Vec<(f64, SpectralVelocityField)>,
    pub final_state: SpectralVelocityField,
}

impl TrajectoryRecord {
    fn push_sample(&mut self, t: f64, u: &SpectralVelocityField, n_cap: f64) {
        let nt = norms(u);
        self.times.push(t);
        self.norm_series.push(nt);
        self.fn_series.push(f_n_factor(nt.v_norm, n_cap));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn h_norm_sq(&self) -> impl Iterator<Item = f64> + '_ {
        self.norm_series.iter().map(|t| t.h_norm * t.h_norm)
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

/// `S(t_final) u0`, recording norms every `record_every` steps.
pub fn evolve(
    u0: &SpectralVelocityField,
    p: &GmnseParams,
    t_final: f64,
    record_every: usize,
) -> Result<TrajectoryRecord, DynamicsError> {
    Stepper::new(p.clone()).evolve(u0, t_final, RecordingPlan::every(record_every))
}
