//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use incompat::bounds::{closed_form_sc, exact_sc, upper_bound_sc};
use incompat::compat::{feasibility_check, random_compatible_set, CompatibilityStatus, SolverSettings};
use incompat::lp::lp_worst_shared;
use incompat::operator::{random_ginibre, random_unitary, validate_povm};
use incompat::quantum::{cube_construction, probability_table, quantum_value};
use incompat::report::{assemble_witness_report, classical_bound, Verdict};
use incompat::scenario::{brute_force_sc, identity_decoding_value, score};
use incompat::seesaw::{seesaw, Constraint, SeesawSettings, HEURISTIC};
use incompat::triple::{
    build_triple, distance_to_boundary, distance_to_exceptional, min_sum_xi, scan_and_classify, xi,
    xi_and_value, ClassifyTolerance, MinSumXiSettings, TripleClass, TripleParams,
};
use incompat::{CMatrix, MeasurementSet, Objective, Povm, Rational, Scenario, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Scenarios with `n <= 4`, `d_y in {2, 3, 4}`, `prod d_y <= 81` and
/// `2 <= dim <= min d_y`.
fn bound_family() -> Vec<Scenario> {
    let mut out = Vec::new();
    for n in 1..=4u32 {
        for code in 0..3usize.pow(n) {
            let mut c = code;
            let outcomes: Vec<usize> = (0..n)
                .map(|_| {
                    let d = 2 + c % 3;
                    c /= 3;
                    d
                })
                .collect();
            if outcomes.iter().product::<usize>() > 81 {
                continue;
            }
            let min = *outcomes.iter().min().unwrap();
            for dim in 2..=min {
                out.push(Scenario::new(outcomes.clone(), dim).unwrap());
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let family = bound_family();
    for sc in &family {
        let exact = exact_sc(sc).map_err(|e| e.to_string())?;
        let (brute, _) = brute_force_sc(sc).map_err(|e| e.to_string())?;
        ensure(exact == brute, || {
            format!("{:?} dim {}: formula {exact} vs search {brute}", sc.outcomes(), sc.dim())
        })?;
    }
    Ok(format!("{} scenarios agree exactly", family.len()))
}

fn criterion_2() -> Outcome {
    let s3 = exact_sc(&Scenario::uniform(3, 2, 2).unwrap()).unwrap();
    let s4 = exact_sc(&Scenario::uniform(4, 2, 2).unwrap()).unwrap();
    ensure(s3 == Rational::new(3, 4), || format!("S_c(3,2,2) = {s3}"))?;
    ensure(s4 == Rational::new(11, 16), || format!("S_c(4,2,2) = {s4}"))?;
    let mut checked = 0;
    for n in 2..=3 {
        for d_tilde in 2..=4 {
            for dim in 2..=d_tilde {
                let closed = closed_form_sc(n, d_tilde, dim).map_err(|e| e.to_string())?;
                let exact = exact_sc(&Scenario::uniform(n, d_tilde, dim).unwrap()).unwrap();
                ensure(closed == exact, || {
                    format!("n={n} d~={d_tilde} d={dim}: closed {closed} vs exact {exact}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("3/4 and 11/16 exact; {checked} closed forms match"))
}

fn criterion_3() -> Outcome {
    let family = bound_family();
    let mut min_slack = f64::INFINITY;
    for sc in &family {
        let exact = exact_sc(sc).unwrap();
        let slack = upper_bound_sc(sc) - *exact.numer() as f64 / *exact.denom() as f64;
        min_slack = min_slack.min(slack);
        ensure(slack >= -1e-12, || format!("{:?} dim {}: slack {slack}", sc.outcomes(), sc.dim()))?;
    }
    for (n, d) in [(2, 2), (3, 2)] {
        let sc = Scenario::uniform(n, d, 2).unwrap();
        let gap = upper_bound_sc(&sc) - 0.75;
        let exact = exact_sc(&sc).unwrap();
        ensure(exact == Rational::new(3, 4) && gap.abs() <= 1e-12, || {
            format!("no equality at n={n}: upper - exact = {gap}")
        })?;
    }
    Ok(format!("min slack {min_slack:.3e}; tight at (2,(2,2),2) and (3,(2,2,2),2)"))
}

fn criterion_4() -> Outcome {
    let ms = MeasurementSet::new(vec![
        Povm::qubit_projective([0.0, 0.0, 1.0]),
        Povm::qubit_projective([1.0, 0.0, 0.0]),
        Povm::qubit_projective([0.0, 1.0, 0.0]),
    ])
    .unwrap();
    let sc = Scenario::uniform(3, 2, 2).unwrap();
    let q = quantum_value(&ms, &sc).unwrap().value;
    let expected = (3.0 + 3f64.sqrt()) / 6.0;
    ensure((q - expected).abs() <= 1e-9, || format!("quantum value {q}"))?;
    let r = assemble_witness_report(&ms, &sc).unwrap();
    ensure(r.verdict == Verdict::Incompatible, || format!("verdict {:?}", r.verdict))?;
    ensure((r.margin - 0.03867).abs() <= 1e-5, || format!("margin {}", r.margin))?;
    Ok(format!("S = {q:.10}, margin {:.6}, INCOMPATIBLE", r.margin))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let m = min_sum_xi(&MinSumXiSettings::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure((m.minimum - 6.0).abs() <= 1e-6, || format!("minimum {}", m.minimum))?;
    ensure(elapsed < Duration::from_secs(300), || format!("search took {elapsed:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_sq: f64 = 0.0;
    let mut lowest = f64::INFINITY;
    for _ in 0..100_000 {
        let v = xi(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        worst_sq = worst_sq.max((v.sum_of_squares() - 12.0).abs());
        lowest = lowest.min(v.sum());
    }
    ensure(worst_sq <= 1e-9, || format!("|sum xi^2 - 12| up to {worst_sq}"))?;
    ensure(lowest >= 6.0 - 1e-9, || format!("sum xi = {lowest} sampled"))?;
    Ok(format!(
        "min {:.9} in {elapsed:.1?} ({} minimizers); |sum xi^2 - 12| <= {worst_sq:.1e}; sampled min {lowest:.6}",
        m.minimum,
        m.argmins.len()
    ))
}

fn criterion_6() -> Outcome {
    let tol = ClassifyTolerance::default();
    let records = scan_and_classify(41, &tol).map_err(|e| e.to_string())?;
    ensure(records.len() == 41 * 41 * 41 * 2, || format!("{} records", records.len()))?;
    let mut counts = [0usize; 4];
    for r in &records {
        let witnessed = r.value > 0.75 + tol.value;
        let near = distance_to_boundary(&r.params) <= tol.parameter
            || distance_to_exceptional(&r.params) <= tol.parameter;
        match r.class {
            TripleClass::Witnessed => {
                counts[0] += 1;
                ensure(witnessed, || format!("{:?} witnessed with S = {}", r.params, r.value))?;
            }
            other => {
                counts[match other {
                    TripleClass::CompatibleBoundary => 1,
                    TripleClass::Exceptional => 2,
                    _ => 3,
                }] += 1;
                ensure(near, || format!("{:?} is {other:?} with S = {}", r.params, r.value))?;
                if other == TripleClass::NoWitness {
                    ensure(!witnessed, || format!("{:?} S = {} unclassified", r.params, r.value))?;
                }
            }
        }
    }
    let sc = Scenario::uniform(3, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let p = TripleParams::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            if i % 2 == 0 { 1 } else { -1 },
        )
        .unwrap();
        let q = quantum_value(&build_triple(&p).unwrap(), &sc).unwrap().value;
        worst = worst.max((q - xi_and_value(&p).1).abs());
    }
    ensure(worst <= 1e-10, || format!("closed form off by {worst}"))?;
    Ok(format!(
        "{} witnessed, {} boundary, {} exceptional, {} unwitnessed; closed form within {worst:.1e}",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_residual: f64 = 0.0;
    let mut worst_gap = f64::NEG_INFINITY;
    for seed in 0..200u64 {
        let dim = rng.random_range(2..=3);
        let n = rng.random_range(2..=3);
        let profile: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
        let (ms, _, _) = random_compatible_set(dim, &profile, seed).map_err(|e| e.to_string())?;
        let v = feasibility_check(&ms, &SolverSettings::default()).map_err(|e| e.to_string())?;
        ensure(v.status == CompatibilityStatus::Compatible && v.residual <= 1e-6, || {
            format!("seed {seed} dim {dim} {profile:?}: {:?} residual {}", v.status, v.residual)
        })?;
        worst_residual = worst_residual.max(v.residual);
        let sc = Scenario::new(profile.clone(), dim).unwrap();
        let q = quantum_value(&ms, &sc).unwrap().value;
        let (c, _) = classical_bound(&sc).map_err(|e| e.to_string())?;
        let gap = q - *c.numer() as f64 / *c.denom() as f64;
        worst_gap = worst_gap.max(gap);
        ensure(gap <= 1e-8, || format!("seed {seed}: quantum {q} exceeds classical {c}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "200 sets COMPATIBLE (max residual {worst_residual:.1e}); max S - S_c = {worst_gap:.3e}; {elapsed:.1?}"
    ))
}

fn criterion_8() -> Outcome {
    let (e, ms) = cube_construction(1.0).unwrap();
    let w1 = score(&probability_table(&e, &ms).unwrap(), Objective::Worst);
    let expected = 0.5 + 1.0 / (2.0 * 3f64.sqrt());
    ensure((w1 - expected).abs() <= 1e-12, || format!("nu = 1 gives {w1}"))?;
    let (e, ms) = cube_construction(3f64.sqrt() / 2.0).unwrap();
    let w2 = score(&probability_table(&e, &ms).unwrap(), Objective::Worst);
    ensure((w2 - 0.75).abs() <= 1e-12, || format!("nu = sqrt(3)/2 gives {w2}"))?;
    let lp = lp_worst_shared(&Scenario::uniform(3, 2, 2).unwrap()).map_err(|e| e.to_string())?;
    ensure(lp.exact == Rational::new(3, 4), || format!("shared-randomness value {}", lp.exact))?;
    Ok(format!("W(nu=1) = {w1:.12}, W(nu=sqrt3/2) = {w2:.12}, LP = {}", lp.exact))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let sc = Scenario::uniform(3, 2, 2).unwrap();
    let r = seesaw(&sc, Objective::Worst, Constraint::Compatible, &SeesawSettings::new(100, 9))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(r.label == HEURISTIC, || "result not labeled HEURISTIC".into())?;
    ensure(r.restarts.len() == 100, || format!("{} restarts", r.restarts.len()))?;
    let top = r.restarts.iter().map(|l| l.value).fold(f64::NEG_INFINITY, f64::max);
    ensure(top <= 2.0 / 3.0 + 1e-6 && r.value <= 2.0 / 3.0 + 1e-6, || {
        format!("restart value {top} exceeds 2/3")
    })?;
    ensure((0.66..=0.6667).contains(&r.value), || format!("best value {}", r.value))?;
    let residual = r
        .parent
        .as_ref()
        .ok_or("no parent returned")?
        .marginal_residual(&r.measurements)
        .map_err(|e| e.to_string())?;
    ensure(residual <= 1e-6, || format!("parent residual {residual}"))?;
    ensure(elapsed < Duration::from_secs(900), || format!("took {elapsed:?}"))?;
    Ok(format!("best {:.10} (HEURISTIC) over 100 restarts in {elapsed:.1?}", r.value))
}

fn criterion_10() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut cases = 0;

    // POVM validation: random valid POVMs pass, perturbed ones fail.
    for _ in 0..300 {
        let dim = rng.random_range(1..=4);
        let outcomes = rng.random_range(1..=4);
        let p = incompat::compat::random_povm(dim, outcomes, &mut rng);
        let effects: Vec<CMatrix> = (0..outcomes).map(|b| p.effect(b).clone()).collect();
        validate_povm(effects.clone(), &tol).map_err(|e| format!("valid POVM rejected: {e}"))?;
        let mut broken = effects;
        broken[0] = &broken[0] + &CMatrix::identity(dim).scale(1e-6);
        ensure(validate_povm(broken, &tol).is_err(), || "perturbed POVM accepted".into())?;
        cases += 1;
    }

    // Unitary invariance of the quantum value.
    for _ in 0..300 {
        let dim = rng.random_range(2..=3);
        let n = rng.random_range(1..=3);
        let profile: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
        let ms = MeasurementSet::new(
            profile
                .iter()
                .map(|&d| incompat::compat::random_povm(dim, d, &mut rng))
                .collect(),
        )
        .unwrap();
        let sc = Scenario::new(profile, dim).unwrap();
        let u = random_unitary(dim, &mut rng);
        let a = quantum_value(&ms, &sc).unwrap().value;
        let b = quantum_value(&ms.conjugate(&u, &tol).unwrap(), &sc).unwrap().value;
        ensure((a - b).abs() <= 1e-10, || format!("conjugation changed {a} to {b}"))?;
        cases += 1;
    }

    // Identity decoding is optimal when dim <= min d_y.
    for _ in 0..200 {
        let n = rng.random_range(1..=3);
        let outcomes: Vec<usize> = (0..n).map(|_| rng.random_range(2..=4)).collect();
        let min = *outcomes.iter().min().unwrap();
        let dim = rng.random_range(2..=min);
        let sc = Scenario::new(outcomes, dim).unwrap();
        let id = identity_decoding_value(&sc).unwrap();
        let (best, _) = brute_force_sc(&sc).unwrap();
        ensure(id == best, || format!("{:?} dim {dim}: identity {id} vs best {best}", sc.outcomes()))?;
        cases += 1;
    }

    // Probability tables from random states and measurements are normalized.
    for _ in 0..300 {
        let dim = rng.random_range(2..=3);
        let n = rng.random_range(1..=3);
        let profile: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
        let ms = MeasurementSet::new(
            profile
                .iter()
                .map(|&d| incompat::compat::random_povm(dim, d, &mut rng))
                .collect(),
        )
        .unwrap();
        let count: usize = profile.iter().product();
        let states = (0..count)
            .map(|_| {
                let g = random_ginibre(dim, &mut rng);
                let rho = &g * &g.adjoint();
                let tr = rho.trace().re;
                rho.scale(1.0 / tr)
            })
            .collect();
        let e = incompat::quantum::StateEnsemble::new(states, &tol).map_err(|e| e.to_string())?;
        let t = probability_table(&e, &ms).map_err(|e| format!("table rejected: {e}"))?;
        for x in 0..count {
            for y in 0..n {
                let s: f64 = t.row(x, y).iter().sum();
                ensure((s - 1.0).abs() <= 1e-10, || format!("row sums to {s}"))?;
            }
        }
        cases += 1;
    }
    ensure(cases >= 1000, || format!("only {cases} cases"))?;
    Ok(format!("{cases} randomized cases"))
}

fn main() {
    let criteria: [Check; 10] = [
        ("classical formula equals exhaustive search", criterion_1),
        ("classical anchors and closed forms", criterion_2),
        ("upper bound dominates the classical value", criterion_3),
        ("Pauli triple witness", criterion_4),
        ("minimum of the xi sum", criterion_5),
        ("triple classification", criterion_6),
        ("random compatible sets", criterion_7),
        ("cube construction and shared randomness", criterion_8),
        ("compatible worst-case see-saw", criterion_9),
        ("randomized property suite", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
