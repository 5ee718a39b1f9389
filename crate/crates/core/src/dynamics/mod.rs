//! Right-hand side and time stepping of the globally modified
//! Navier-Stokes equations
//!
//! `∂u/∂t − νΔu + F_N(‖u‖)(u·∇)u + ∇p = f,  ∇·u = 0`
//!
//! posed on the periodic torus, with the pressure removed by the Leray
//! projection.

mod modulation;
mod nonlinear;
mod params;
mod stepper;

use thiserror::Error;

pub use modulation::f_n_factor;
pub use nonlinear::{convective_term, Advection, AdvectionOutput};
pub use params::GmnseParams;
pub use stepper::{evolve, rhs, step, RecordingPlan, StepInfo, Stepper, TrajectoryRecord, CFL_FACTOR};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("field and parameters live on different domains")]
    DomainMismatch,
    #[error("invalid time {0}: must be finite and nonnegative")]
    InvalidTime(f64),
    #[error("blow-up: non-finite state at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },
}
