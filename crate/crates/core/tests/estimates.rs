use gmnse::dynamics::{GmnseParams, RecordingPlan, Stepper};
use gmnse::estimates::{monitor_enstrophy, monitor_lipschitz};
use gmnse::spectral::{random_field, random_field_with, RandomSpectrum, TorusDomain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fitted_enstrophy_c(u0: &gmnse::spectral::SpectralVelocityField, dom: TorusDomain) -> f64 {
    let p = GmnseParams::unforced(dom, 0.05, 100.0, 1e-3).unwrap();
    let u = u0.resample(dom).unwrap();
    let rec = Stepper::new(p.clone()).evolve(&u, 0.1, RecordingPlan::every(1)).unwrap();
    monitor_enstrophy(&rec, &p).unwrap().fitted_c.unwrap()
}

#[test]
fn enstrophy_constant_is_stable_under_resolution_doubling() {
    let coarse = TorusDomain::periodic_cube(8).unwrap();
    let fine = TorusDomain::periodic_cube(16).unwrap();
    // low modes only, so both grids resolve the same initial interactions
    let spectrum = RandomSpectrum {
        decay: 2.0,
        min_k2: 1,
        max_k2: Some(2),
    };
    for seed in 0..2 {
        let u0 = random_field_with(&coarse, &mut ChaCha8Rng::seed_from_u64(seed), 60.0, spectrum);
        let (a, b) = (fitted_enstrophy_c(&u0, coarse), fitted_enstrophy_c(&u0, fine));
        assert!(a > 0.0 && b > 0.0);
        assert!((a - b).abs() <= 0.5 * a.max(b), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn lipschitz_constant_is_independent_of_perturbation_size() {
    let dom = TorusDomain::periodic_cube(8).unwrap();
    let p = GmnseParams::unforced(dom, 0.05, 100.0, 1e-3).unwrap();
    let u0 = random_field(&dom, &mut ChaCha8Rng::seed_from_u64(2), 60.0);
    let w = random_field(&dom, &mut ChaCha8Rng::seed_from_u64(3), 1.0);
    let c: Vec<f64> = [1e-2, 1e-4]
        .iter()
        .map(|eps| {
            let rep = monitor_lipschitz(&u0, &(&u0 + &(&w * *eps)), &p, 0.2).unwrap();
            rep.fitted_c.unwrap()
        })
        .collect();
    assert!(c[0] > 0.0);
    assert!((c[0] - c[1]).abs() <= 0.2 * c[0].max(c[1]), "{c:?}");
}
