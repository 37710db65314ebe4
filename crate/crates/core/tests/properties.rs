use incompat::compat::{
    feasibility_check, induce, marginalize, random_compatible_set, random_parent, random_povm,
    CompatibilityStatus, PostProcessing, SolverSettings, TupleIndexer,
};
use incompat::io::{measurements_to_json, parse_measurements};
use incompat::operator::{eigh, random_hermitian, random_unitary, validate_povm};
use incompat::quantum::{probability_table, qubit_projective_value, quantum_value};
use incompat::report::{assemble_witness_report, classical_bound, recompute_verdict, Verdict};
use incompat::scenario::score;
use incompat::triple::{build_triple, xi, xi_and_value, TripleParams};
use incompat::{CMatrix, MeasurementSet, Objective, Povm, Scenario, ToleranceConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_set(dim: usize, profile: &[usize], seed: u64) -> MeasurementSet {
    let mut r = rng(seed);
    MeasurementSet::new(profile.iter().map(|&d| random_povm(dim, d, &mut r)).collect()).unwrap()
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn marginals_of_random_parents_are_povms(seed in any::<u64>(), dim in 2usize..4, n in 1usize..4) {
        let profile: Vec<usize> = (0..n).map(|y| 2 + (seed as usize >> y) % 2).collect();
        let parent = random_parent(dim, &profile, &mut rng(seed));
        for y in 0..n {
            let m = marginalize(&parent, y).unwrap();
            let effects: Vec<CMatrix> = (0..m.outcomes()).map(|b| m.effect(b).clone()).collect();
            prop_assert!(validate_povm(effects, &ToleranceConfig::default()).is_ok());
        }
        let via_post = induce(&parent, &PostProcessing::deterministic(&profile)).unwrap();
        for y in 0..n {
            let m = marginalize(&parent, y).unwrap();
            for b in 0..profile[y] {
                prop_assert_eq!(via_post.povm(y).effect(b), m.effect(b));
            }
        }
    }

    #[test]
    fn tuple_index_round_trip(profile in prop::collection::vec(1usize..5, 1..5), k in any::<usize>()) {
        let idx = TupleIndexer::new(&profile);
        let k = k % idx.len();
        prop_assert_eq!(idx.index(&idx.tuple(k)), k);
    }

    #[test]
    fn qubit_closed_form_matches_eigenvalues(
        axes in prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), 1..4)
    ) {
        prop_assume!(axes.iter().all(|a| a.iter().map(|v| v * v).sum::<f64>() > 1e-3));
        let axes: Vec<[f64; 3]> = axes.into_iter().map(unit).collect();
        let ms = MeasurementSet::new(axes.iter().map(|&a| Povm::qubit_projective(a)).collect()).unwrap();
        let sc = Scenario::uniform(axes.len(), 2, 2).unwrap();
        let q = quantum_value(&ms, &sc).unwrap().value;
        prop_assert!((q - qubit_projective_value(&axes)).abs() <= 1e-10);
    }

    #[test]
    fn quantum_value_is_unitarily_invariant(seed in any::<u64>(), dim in 2usize..4) {
        let ms = random_set(dim, &[2, 3], seed);
        let sc = Scenario::new(vec![2, 3], dim).unwrap();
        let u = random_unitary(dim, &mut rng(seed ^ 1));
        let a = quantum_value(&ms, &sc).unwrap().value;
        let b = quantum_value(&ms.conjugate(&u, &ToleranceConfig::default()).unwrap(), &sc).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn optimal_ensemble_reproduces_quantum_value(seed in any::<u64>(), dim in 2usize..4) {
        let ms = random_set(dim, &[3, 2, 2], seed);
        let sc = Scenario::new(vec![3, 2, 2], dim).unwrap();
        let q = quantum_value(&ms, &sc).unwrap();
        let t = probability_table(&q.ensemble, &ms).unwrap();
        prop_assert!((score(&t, Objective::Average) - q.value).abs() <= 1e-10);
    }

    #[test]
    fn xi_identity_and_minimum(a in -1.0f64..=1.0, b in -1.0f64..=1.0, g in -1.0f64..=1.0) {
        let v = xi(a, b, g);
        prop_assert!((v.sum_of_squares() - 12.0).abs() <= 1e-9);
        prop_assert!(v.sum() >= 6.0 - 1e-9);
    }

    #[test]
    fn xi_value_matches_eigenvalues_for_both_signs(a in -1.0f64..=1.0, b in -1.0f64..=1.0, g in -1.0f64..=1.0) {
        let sc = Scenario::uniform(3, 2, 2).unwrap();
        for sign in [1, -1] {
            let p = TripleParams::new(a, b, g, sign).unwrap();
            let q = quantum_value(&build_triple(&p).unwrap(), &sc).unwrap().value;
            prop_assert!((q - xi_and_value(&p).1).abs() <= 1e-10);
        }
    }

    #[test]
    fn triple_value_is_unitarily_invariant(a in -1.0f64..=1.0, b in -1.0f64..=1.0, g in -1.0f64..=1.0, seed in any::<u64>()) {
        let sc = Scenario::uniform(3, 2, 2).unwrap();
        let p = TripleParams::new(a, b, g, 1).unwrap();
        let u = random_unitary(2, &mut rng(seed));
        let ms = incompat::triple::build_triple_conjugated(&p, &u, &ToleranceConfig::default()).unwrap();
        prop_assert!((quantum_value(&ms, &sc).unwrap().value - xi_and_value(&p).1).abs() <= 1e-10);
    }

    #[test]
    fn measurement_json_round_trip(seed in any::<u64>(), dim in 1usize..4) {
        let ms = random_set(dim, &[2, 3], seed);
        let text = measurements_to_json(&ms);
        let back = parse_measurements(&text, &ToleranceConfig::default()).unwrap();
        prop_assert_eq!(&back, &ms);
        prop_assert_eq!(measurements_to_json(&back), text);
    }

    #[test]
    fn witness_reports_are_self_consistent(seed in any::<u64>()) {
        let ms = random_set(2, &[2, 2, 2], seed);
        let sc = Scenario::uniform(3, 2, 2).unwrap();
        let r = assemble_witness_report(&ms, &sc).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: incompat::report::WitnessReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(recompute_verdict(&back), r.verdict);
        let c = *r.s_classical.numer() as f64 / *r.s_classical.denom() as f64;
        prop_assert!(c <= r.s_upper + 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..6) {
        let h = random_hermitian(dim, &mut rng(seed));
        let e = eigh(h.matrix(), 1e-13).unwrap();
        prop_assert!(e.reconstruct(|l| l).max_abs_diff(h.matrix()) <= 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compatible_sets_are_certified_and_never_witnessed(seed in any::<u64>(), dim in 2usize..4, n in 2usize..4) {
        let profile: Vec<usize> = (0..n).map(|y| 2 + (seed as usize >> (3 * y)) % 2).collect();
        let (ms, _, _) = random_compatible_set(dim, &profile, seed).unwrap();
        let v = feasibility_check(&ms, &SolverSettings::default()).unwrap();
        prop_assert_eq!(v.status, CompatibilityStatus::Compatible);
        let cert = v.certificate.unwrap();
        prop_assert!(cert.marginal_residual(&ms).unwrap() <= 1e-7);
        let sc = Scenario::new(profile, dim).unwrap();
        let (c, _) = classical_bound(&sc).unwrap();
        let q = quantum_value(&ms, &sc).unwrap().value;
        prop_assert!(q <= *c.numer() as f64 / *c.denom() as f64 + 1e-8);
        prop_assert_eq!(assemble_witness_report(&ms, &sc).unwrap().verdict, Verdict::NoWitness);
    }

    #[test]
    fn dykstra_residual_does_not_grow(seed in any::<u64>()) {
        let (ms, _, _) = random_compatible_set(2, &[2, 2], seed).unwrap();
        let settings = SolverSettings { tolerance: 0.0, max_iterations: 400, ..SolverSettings::default() };
        let v = feasibility_check(&ms, &settings).unwrap();
        let windows: Vec<f64> = v.history[50.min(v.history.len())..]
            .chunks(50)
            .filter(|c| c.len() == 50)
            .map(|c| c.iter().sum::<f64>() / 50.0)
            .collect();
        for w in windows.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{:?}", windows);
        }
    }
}
