//! Pseudo-spectral simulation of the globally modified Navier-Stokes
//! equations on a periodic box, with runtime monitors for the a priori
//! estimates and finite approximations of the global attractor.
//!
//! ```
//! use gmnse::dynamics::{GmnseParams, RecordingPlan, Stepper};
//! use gmnse::spectral::{random_field, TorusDomain};
//! use rand::SeedableRng;
//!
//! let dom = TorusDomain::periodic_cube(8).unwrap();
//! let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-3).unwrap();
//! let u0 = random_field(&dom, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0), 5.0);
//! let tr = Stepper::new(p).evolve(&u0, 0.05, RecordingPlan::every(10)).unwrap();
//! assert!(tr.norm_series.last().unwrap().h_norm < 5.0);
//! ```

pub mod attractor;
pub mod dynamics;
pub mod estimates;
pub mod presets;
pub mod regression;
pub mod spectral;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/estimates.md")]
    mod estimates {}
    #[doc = include_str!("../../../book/src/attractor.md")]
    mod attractor {}
}
