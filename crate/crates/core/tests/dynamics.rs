use gmnse::dynamics::{convective_term, evolve, f_n_factor, rhs, step, GmnseParams, RecordingPlan, Stepper};
use gmnse::spectral::{
    leray_project, norms, random_field, stokes_apply, SpectralVelocityField, TorusDomain, VectorCoefficients,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

use common::{convolution_oracle, max_rel_diff};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[test]
fn convective_term_matches_convolution_oracle() {
    for dom in [TorusDomain::periodic_cube(8).unwrap(), TorusDomain::periodic_square(8).unwrap()] {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let u = random_field(&dom, &mut rng, 1.0);
            let b = convective_term(&u);
            let err = max_rel_diff(&b, &convolution_oracle(&u));
            assert!(err < 1e-10, "relative error {err:e}");
        }
    }
}

#[test]
fn two_mode_field_matches_oracle() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let mut raw = VectorCoefficients::zeros(dom);
    raw.set_real_mode([1, 0, 0], [ZERO, Complex64::new(0.0, -0.5), ZERO]).unwrap();
    raw.set_real_mode([0, 1, 1], [Complex64::new(0.3, 0.1), ZERO, ZERO]).unwrap();
    let u = leray_project(&raw);
    let err = max_rel_diff(&convective_term(&u), &convolution_oracle(&u));
    assert!(err < 1e-12, "{err:e}");
}

fn shear_flow(dom: TorusDomain) -> SpectralVelocityField {
    // u = (sin y, 0, 0)
    let mut raw = VectorCoefficients::zeros(dom);
    raw.set_real_mode([0, 1, 0], [Complex64::new(0.0, -0.5), ZERO, ZERO]).unwrap();
    leray_project(&raw)
}

#[test]
fn shear_flow_has_no_self_advection() {
    let dom = TorusDomain::periodic_cube(16).unwrap();
    let b = convective_term(&shear_flow(dom));
    assert!(b.coefficients().iter().all(|z| z.norm() < 1e-15));
    assert!(convective_term(&SpectralVelocityField::zeros(dom)).is_zero());
}

#[test]
fn advection_is_skew_symmetric() {
    let dom = TorusDomain::periodic_cube(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let u = random_field(&dom, &mut rng, 10.0);
        let b = convective_term(&u);
        let ip = b.inner(&u);
        let scale = norms(&b).h_norm * norms(&u).h_norm;
        assert!(ip.abs() <= 1e-10 * scale, "⟨B(u),u⟩ = {ip:e} vs scale {scale:e}");
        assert!(b.divergence_defect() < 1e-12);
    }
}

fn forced_params(dom: TorusDomain) -> GmnseParams {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let f = random_field(&dom, &mut rng, 5.0);
    GmnseParams::new(1.0, 10.0, 1e-3, f).unwrap()
}

#[test]
fn rhs_composition() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let p = forced_params(dom);
    assert_eq!(rhs(&SpectralVelocityField::zeros(dom), &p), *p.forcing());

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let u = random_field(&dom, &mut rng, 30.0);
    let fn_value = f_n_factor(norms(&u).v_norm, p.n_cap());
    assert!(fn_value < 1.0, "test field should sit on the modulated branch");
    let expected = p
        .forcing()
        .axpy(-p.nu(), &stokes_apply(&u))
        .axpy(-fn_value, &convective_term(&u));
    let got = rhs(&u, &p);
    let diff = norms(&(&got - &expected)).h_norm;
    assert!(diff <= 1e-13 * norms(&expected).h_norm);
}

#[test]
fn unforced_eigenmode_decays_linearly() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let p = GmnseParams::unforced(dom, 0.7, 10.0, 1e-2).unwrap();
    let u = shear_flow(dom);
    let r = rhs(&u, &p);
    let expected = u.scaled(-0.7);
    assert!(norms(&(&r - &expected)).h_norm < 1e-14);

    let next = step(&u, &p).unwrap();
    let factor = (-0.7_f64 * 1e-2).exp();
    let want = Complex64::new(0.0, -0.5) * factor;
    assert!((next.mode([0, 1, 0]).unwrap()[0] - want).norm() < 1e-16);
    assert!(step(&SpectralVelocityField::zeros(dom), &p).unwrap().is_zero());
}

#[test]
fn step_preserves_invariants_and_is_deterministic() {
    let dom = TorusDomain::periodic_cube(16).unwrap();
    let p = forced_params(dom);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_field(&dom, &mut rng, 40.0);
    let a = step(&u, &p).unwrap();
    let b = step(&u, &p).unwrap();
    assert_eq!(a, b);
    assert!(a.validate(1e-12).is_ok());
}

#[test]
fn semigroup_property_is_bitwise() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let p = forced_params(dom);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u0 = random_field(&dom, &mut rng, 20.0);
    let whole = evolve(&u0, &p, 0.05, 1).unwrap();
    let first = evolve(&u0, &p, 0.02, 1).unwrap();
    let second = evolve(&first.final_state, &p, 0.03, 1).unwrap();
    assert_eq!(whole.final_state, second.final_state);
    assert_eq!(whole.len(), 51);
}

#[test]
fn zero_time_records_initial_state_only() {
    let dom = TorusDomain::periodic_square(8).unwrap();
    let p = forced_params(dom);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let u0 = random_field(&dom, &mut rng, 1.0);
    let rec = evolve(&u0, &p, 0.0, 1).unwrap();
    assert_eq!(rec.times, vec![0.0]);
    assert_eq!(rec.final_state, u0);
}

#[test]
fn unforced_decay_is_bounded_by_gronwall() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let p = GmnseParams::unforced(dom, 1.0, 10.0, 1e-3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let u0 = random_field(&dom, &mut rng, 50.0);
    let rec = evolve(&u0, &p, 1.0, 10).unwrap();
    let h0 = rec.norm_series[0].h_norm;
    for (t, n) in rec.times.iter().zip(&rec.norm_series) {
        assert!(n.h_norm <= h0 * (-p.nu() * p.lambda1() * t).exp() * (1.0 + 1e-9));
    }
}

#[test]
fn record_series_respect_modulation_bound() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let p = forced_params(dom);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let u0 = random_field(&dom, &mut rng, 200.0);
    let rec = Stepper::new(p.clone())
        .evolve(&u0, 0.1, RecordingPlan::every(5).with_checkpoints(50))
        .unwrap();
    assert_eq!(rec.checkpoints.len(), 3);
    for (f, n) in rec.fn_series.iter().zip(&rec.norm_series) {
        assert!(*f > 0.0 && *f <= 1.0);
        assert!(f * n.v_norm <= p.n_cap() * (1.0 + f64::EPSILON));
    }
    assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn blow_up_is_reported_with_step() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let p = forced_params(dom);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let u0 = random_field(&dom, &mut rng, 1.0).scaled(f64::NAN);
    let err = evolve(&u0, &p, 0.01, 1).unwrap_err();
    assert!(err.to_string().contains("blow-up"));
}

#[test]
fn scheme_converges_at_first_order() {
    let p0 = gmnse::presets::default_params_at(8).unwrap();
    let u0 = random_field(p0.domain(), &mut ChaCha8Rng::seed_from_u64(1), 20.0);
    let (h, t) = (2e-3, 0.2);
    let solve = |dt: f64| {
        let p = p0.with_dt(dt).unwrap();
        Stepper::new(p.clone()).advance(&u0, p.steps_for(t).unwrap()).unwrap()
    };
    let reference = solve(h / 8.0);
    let errs: Vec<f64> = [4.0, 2.0, 1.0]
        .iter()
        .map(|f| norms(&(&solve(f * h) - &reference)).h_norm)
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((0.8..=1.2).contains(&order), "observed order {order} from {errs:?}");
    }
}
