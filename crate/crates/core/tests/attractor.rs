use gmnse::attractor::{approximate_attractor, hausdorff_semidistance, EnsembleLabel, EnsembleState, NormKind};
use gmnse::estimates::{burn_in, holds};
use gmnse::presets::default_params_at;
use gmnse::spectral::{norms, random_field};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sampling_converges_and_stays_in_the_balls() {
    let p = default_params_at(8).unwrap();
    let u0 = random_field(p.domain(), &mut ChaCha8Rng::seed_from_u64(4), 20.0);
    let b = burn_in(&u0, &p, 1.5, 10).unwrap();
    let seed = EnsembleState::singleton(b.state, EnsembleLabel::InitialSet);
    let sample = |n| approximate_attractor(&seed, &p, 0.0, 0.8, n).unwrap();
    let (a4, a8, a16) = (sample(4), sample(8), sample(16));
    let d1 = hausdorff_semidistance(&a8, &a4, NormKind::H).unwrap();
    let d2 = hausdorff_semidistance(&a16, &a8, NormKind::H).unwrap();
    assert!(d1 > 0.0 && d2 < d1, "{d1} then {d2}");
    // nested snapshot times
    assert_eq!(hausdorff_semidistance(&a4, &a16, NormKind::H).unwrap(), 0.0);

    let r = b.radii;
    for m in a16.members() {
        let n = norms(m);
        assert!(holds(n.h_norm.powi(2) - r.rho_h_sq, r.rho_h_sq));
        assert!(holds(n.v_norm.powi(2) - r.rho_v_sq_formula, r.rho_v_sq_formula));
    }
}
