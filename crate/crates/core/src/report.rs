//! Witness reports: comparing the quantum value of a measurement set with the
//! classical value of the same RAC.

use serde::{Deserialize, Serialize};

use crate::bounds::{exact_sc, upper_bound_sc};
use crate::compat::{feasibility_check, CompatibilityStatus, CompatibilityVerdict, SolverSettings};
use crate::error::{Error, Result};
use crate::lp::RationalExt;
use crate::operator::MeasurementSet;
use crate::quantum::quantum_value;
use crate::scenario::{brute_force_sc, Scenario};
use crate::tolerance::ToleranceConfig;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassicalMethod {
    ExactFormula,
    BruteForce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Incompatible,
    NoWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub quantum_method: String,
    pub classical_method: ClassicalMethod,
    pub decision_tolerance: f64,
    pub tolerances: ToleranceConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub scenario: Scenario,
    pub s_quantum: f64,
    #[serde(with = "crate::io::rational_json")]
    pub s_classical: Rational,
    pub s_upper: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

/// `S_c` from the closed formula when it applies, else by exhaustive search.
pub fn classical_bound(sc: &Scenario) -> Result<(Rational, ClassicalMethod)> {
    if sc.dim() <= sc.min_outcomes() {
        return Ok((exact_sc(sc)?, ClassicalMethod::ExactFormula));
    }
    match brute_force_sc(sc) {
        Ok((v, _)) => Ok((v, ClassicalMethod::BruteForce)),
        Err(Error::TooLarge { count, limit }) => Err(Error::BoundUnavailable(format!(
            "no closed formula for dim {} > min outcomes {}, and exhaustive search needs {count} decodings (limit {limit})",
            sc.dim(),
            sc.min_outcomes()
        ))),
        Err(e) => Err(e),
    }
}

fn decide(margin: f64, tolerance: f64) -> Verdict {
    if margin > tolerance {
        Verdict::Incompatible
    } else {
        Verdict::NoWitness
    }
}

pub fn assemble_witness_report(ms: &MeasurementSet, sc: &Scenario) -> Result<WitnessReport> {
    assemble_with(ms, sc, &ToleranceConfig::default())
}

pub fn assemble_with(ms: &MeasurementSet, sc: &Scenario, tol: &ToleranceConfig) -> Result<WitnessReport> {
    let s_quantum = quantum_value(ms, sc)?.value;
    let (s_classical, method) = classical_bound(sc)?;
    let margin = s_quantum - s_classical.to_f64_lossy();
    Ok(WitnessReport {
        scenario: sc.clone(),
        s_quantum,
        s_classical,
        s_upper: upper_bound_sc(sc),
        margin,
        verdict: decide(margin, tol.decision),
        provenance: Provenance {
            quantum_method: "TOP_EIGENVALUE".into(),
            classical_method: method,
            decision_tolerance: tol.decision,
            tolerances: *tol,
        },
    })
}

/// Recomputes the verdict from the report's own numbers.
pub fn recompute_verdict(r: &WitnessReport) -> Verdict {
    decide(r.s_quantum - r.s_classical.to_f64_lossy(), r.provenance.decision_tolerance)
}

/// Runs the parent search and, when it fails to certify compatibility, the
/// RAC witness. A positive witness upgrades the verdict to INCOMPATIBLE.
pub fn decide_compatibility(
    ms: &MeasurementSet,
    sc: &Scenario,
    settings: &SolverSettings,
) -> Result<CompatibilityVerdict> {
    let mut verdict = feasibility_check(ms, settings)?;
    if verdict.status == CompatibilityStatus::Compatible {
        return Ok(verdict);
    }
    let report = assemble_witness_report(ms, sc)?;
    Ok(upgrade(&mut verdict, report).clone())
}

/// Attaches a witness report to an undecided verdict, switching it to
/// `Incompatible` when the witness fires. Compatible verdicts are untouched.
pub fn upgrade(verdict: &mut CompatibilityVerdict, report: WitnessReport) -> &CompatibilityVerdict {
    if verdict.status == CompatibilityStatus::Compatible {
        return verdict;
    }
    if report.verdict == Verdict::Incompatible {
        verdict.status = CompatibilityStatus::Incompatible;
    }
    verdict.witness = Some(Box::new(report));
    verdict
}
