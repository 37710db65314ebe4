use incompat::compat::{feasibility_check, random_povm, CompatibilityStatus, SolverSettings};
use incompat::quantum::quantum_value;
use incompat::report::decide_compatibility;
use incompat::seesaw::{seesaw, Constraint, SeesawSettings};
use incompat::triple::{
    build_triple, min_sum_xi, MinSumXiSettings, TripleParams, EXCEPTIONAL_POINTS,
};
use incompat::{MeasurementSet, Objective, Povm, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn aligned_triple_is_compatible() {
    for gamma in [-1.0, 0.0, 0.4] {
        let ms = build_triple(&TripleParams::new(1.0, 1.0, gamma, 1).unwrap()).unwrap();
        let v = feasibility_check(&ms, &SolverSettings::default()).unwrap();
        assert_eq!(v.status, CompatibilityStatus::Compatible);
        assert!(v.certificate.unwrap().marginal_residual(&ms).unwrap() <= 1e-7);
    }
    let flipped = build_triple(&TripleParams::new(-1.0, 1.0, 0.0, -1).unwrap()).unwrap();
    let v = feasibility_check(&flipped, &SolverSettings::default()).unwrap();
    assert_eq!(v.status, CompatibilityStatus::Compatible);
}

#[test]
fn identical_copies_of_random_povms() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for dim in 2..=3 {
        let p = random_povm(dim, 3, &mut rng);
        let ms = MeasurementSet::new(vec![p.clone(), p.clone(), p]).unwrap();
        let v = feasibility_check(&ms, &SolverSettings::default()).unwrap();
        assert_eq!(v.status, CompatibilityStatus::Compatible);
    }
}

#[test]
fn unbiased_bases_stay_undecided_until_witnessed() {
    let ms = MeasurementSet::new(vec![
        Povm::qubit_projective([0.0, 0.0, 1.0]),
        Povm::qubit_projective([1.0, 0.0, 0.0]),
    ])
    .unwrap();
    let v = feasibility_check(&ms, &SolverSettings::default()).unwrap();
    assert_eq!(v.status, CompatibilityStatus::Indeterminate);
    assert!(v.residual >= 1e-3);
    assert_eq!(v.iterations, 20_000);

    let sc = Scenario::uniform(2, 2, 2).unwrap();
    let q = quantum_value(&ms, &sc).unwrap().value;
    assert!((q - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    let upgraded = decide_compatibility(&ms, &sc, &SolverSettings::default()).unwrap();
    assert_eq!(upgraded.status, CompatibilityStatus::Incompatible);
    assert!(upgraded.witness.unwrap().margin > 0.1);
}

#[test]
fn sum_of_xi_minimizers() {
    let m = min_sum_xi(&MinSumXiSettings::default()).unwrap();
    assert!((m.minimum - 6.0).abs() <= 1e-6);
    let near = |p: &[f64; 3], q: &[f64; 3]| p.iter().zip(q).all(|(a, b)| (a - b).abs() < 1e-3);
    for e in EXCEPTIONAL_POINTS {
        assert!(m.argmins.iter().any(|p| near(p, &e)), "missing {e:?} in {:?}", m.argmins);
    }
    for (a, b) in [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
        assert!(
            m.argmins.iter().any(|p| (p[0] - a).abs() < 1e-3 && (p[1] - b).abs() < 1e-3),
            "no minimizer at alpha = {a}, beta = {b}"
        );
    }
}

#[test]
fn positive_octant_minimum_only_at_aligned_corner() {
    let settings = MinSumXiSettings {
        lower: [0.0; 3],
        upper: [1.0; 3],
        ..MinSumXiSettings::default()
    };
    let m = min_sum_xi(&settings).unwrap();
    assert!((m.minimum - 6.0).abs() <= 1e-6);
    assert!(!m.argmins.is_empty());
    for p in &m.argmins {
        assert!(p[0] > 1.0 - 1e-3 && p[1] > 1.0 - 1e-3, "{p:?}");
    }
}

#[test]
fn free_seesaw_never_beats_its_own_measurements() {
    let sc = Scenario::new(vec![2, 3], 2).unwrap();
    for objective in [Objective::Average, Objective::Worst] {
        let r = seesaw(&sc, objective, Constraint::Free, &SeesawSettings::new(3, 4)).unwrap();
        let q = quantum_value(&r.measurements, &sc).unwrap().value;
        assert!(r.value <= q + 1e-9);
        assert_eq!(r.restarts.len(), 3);
        let top = r.restarts.iter().map(|l| l.value).fold(f64::NEG_INFINITY, f64::max);
        assert!((top - r.value).abs() <= 1e-9);
    }
}

#[test]
fn compatible_seesaw_returns_a_valid_parent() {
    let sc = Scenario::uniform(2, 2, 2).unwrap();
    let r = seesaw(&sc, Objective::Worst, Constraint::Compatible, &SeesawSettings::new(3, 11)).unwrap();
    let parent = r.parent.unwrap();
    assert!(parent.marginal_residual(&r.measurements).unwrap() <= 1e-6);
    assert!(r.value <= 0.75 + 1e-8);
}
