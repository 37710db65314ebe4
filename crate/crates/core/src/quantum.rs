//! Quantum strategies for a fixed set of measurements.
//!
//! For each input `x` the best state is a top eigenvector of
//! `chi(x) = sum_y M_{x_y|y}`, so the quantum value of a measurement set is
//! the normalized sum of the largest eigenvalues of these operators.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{
    pauli_x, pauli_y, pauli_z, top_eigenpair, CMatrix, HermitianOperator, MeasurementSet, Povm,
};
use crate::scenario::{ProbabilityTable, Scenario};
use crate::tolerance::ToleranceConfig;

/// One density matrix per input string.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateEnsemble {
    dim: usize,
    states: Vec<CMatrix>,
}

impl StateEnsemble {
    pub fn new(states: Vec<CMatrix>, tol: &ToleranceConfig) -> Result<Self> {
        let dim = match states.first() {
            Some(s) => s.dim(),
            None => return Err(Error::ShapeMismatch("ensemble is empty".into())),
        };
        for (index, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::NotSquare {
                    index,
                    expected: dim,
                });
            }
            let h = HermitianOperator::new(s.clone(), tol).map_err(|e| match e {
                Error::NonHermitian { deviation, .. } => Error::NonHermitian { index, deviation },
                other => other,
            })?;
            let min_eigenvalue = h.min_eigenvalue()?;
            if min_eigenvalue < -tol.psd {
                return Err(Error::NotPositive {
                    index,
                    min_eigenvalue,
                });
            }
            let tr = s.trace().re;
            if (tr - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized { norm_sq: tr });
            }
        }
        Ok(Self {
            dim,
            states: states.iter().map(CMatrix::hermitian_part).collect(),
        })
    }

    pub(crate) fn from_unchecked(states: Vec<CMatrix>) -> Self {
        Self {
            dim: states[0].dim(),
            states,
        }
    }

    /// Every state maximally mixed.
    pub fn maximally_mixed(dim: usize, count: usize) -> Self {
        Self::from_unchecked(vec![CMatrix::identity(dim).scale(1.0 / dim as f64); count])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[CMatrix] {
        &self.states
    }

    pub fn state(&self, x: usize) -> &CMatrix {
        &self.states[x]
    }
}

/// `sum_y M_{x_y|y}`.
pub fn chi(ms: &MeasurementSet, x: &[usize]) -> Result<HermitianOperator> {
    if x.len() != ms.len() {
        return Err(Error::RangeViolation(format!(
            "input has {} dits, measurement set has {} measurements",
            x.len(),
            ms.len()
        )));
    }
    let mut acc = CMatrix::zeros(ms.dim());
    for (y, &xy) in x.iter().enumerate() {
        let p = ms.povm(y);
        if xy >= p.outcomes() {
            return Err(Error::RangeViolation(format!(
                "dit {y} = {xy} outside [0, {})",
                p.outcomes()
            )));
        }
        acc += p.effect(xy);
    }
    Ok(HermitianOperator::from_hermitian(acc))
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumValue {
    pub value: f64,
    /// Largest eigenvalue of `chi(x)` per input index.
    pub norms: Vec<f64>,
    /// Projectors onto the top eigenvectors.
    #[serde(skip)]
    pub ensemble: StateEnsemble,
}

fn check_shape(ms: &MeasurementSet, sc: &Scenario) -> Result<()> {
    if ms.outcome_profile() != sc.outcomes() || ms.dim() != sc.dim() {
        return Err(Error::ShapeMismatch(format!(
            "measurements have profile {:?} in dim {}, scenario has {:?} in dim {}",
            ms.outcome_profile(),
            ms.dim(),
            sc.outcomes(),
            sc.dim()
        )));
    }
    Ok(())
}

/// Best average success probability achievable with `ms`.
pub fn quantum_value(ms: &MeasurementSet, sc: &Scenario) -> Result<QuantumValue> {
    check_shape(ms, sc)?;
    let pairs = (0..sc.input_count())
        .into_par_iter()
        .map(|xi| {
            let h = chi(ms, &sc.input(xi))?;
            let (lam, v) = top_eigenpair(&h)?;
            Ok((lam, v.projector()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (norms, states): (Vec<f64>, Vec<CMatrix>) = pairs.into_iter().unzip();
    let value = norms.iter().sum::<f64>() / sc.normalizer() as f64;
    Ok(QuantumValue {
        value,
        norms,
        ensemble: StateEnsemble::from_unchecked(states),
    })
}

/// Closed form of the quantum value for rank-one projective qubit
/// measurements with Bloch axes `axes` (outcome 0 along `+axis`):
/// `sum_x (n + |sum_y (-1)^{x_y} s_y|) / 2`, normalized.
pub fn qubit_projective_value(axes: &[[f64; 3]]) -> f64 {
    let n = axes.len();
    let count = 1usize << n;
    let mut total = 0.0;
    for x in 0..count {
        let mut r = [0.0; 3];
        for (y, s) in axes.iter().enumerate() {
            let sign = if (x >> (n - 1 - y)) & 1 == 0 { 1.0 } else { -1.0 };
            for k in 0..3 {
                r[k] += sign * s[k];
            }
        }
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        total += 0.5 * (n as f64 + norm);
    }
    total / (n * count) as f64
}

/// `p(b | x, y) = Tr(rho_x M_{b|y})`.
pub fn probability_table(e: &StateEnsemble, ms: &MeasurementSet) -> Result<ProbabilityTable> {
    let sc = Scenario::new(ms.outcome_profile(), ms.dim())?;
    if e.dim() != ms.dim() || e.len() != sc.input_count() {
        return Err(Error::ShapeMismatch(format!(
            "ensemble of {} states in dim {} for {} inputs in dim {}",
            e.len(),
            e.dim(),
            sc.input_count(),
            ms.dim()
        )));
    }
    let stride: usize = sc.outcomes().iter().sum();
    let mut entries = Vec::with_capacity(stride * sc.input_count());
    for rho in &e.states {
        for p in ms.povms() {
            for b in 0..p.outcomes() {
                entries.push(rho.trace_product(p.effect(b)).clamp(0.0, 1.0));
            }
        }
    }
    ProbabilityTable::new(sc, entries)
}

/// Bloch vector of the cube state for input index `x` of the three-bit RAC:
/// `((-1)^{x_2}, (-1)^{x_3}, (-1)^{x_1}) / sqrt(3)`.
pub fn cube_vector(x: &[usize]) -> [f64; 3] {
    let s = |b: usize| if b == 0 { 1.0 } else { -1.0 } / 3f64.sqrt();
    [s(x[1]), s(x[2]), s(x[0])]
}

/// Measurements along z, x and y with noisy cube states
/// `nu |r_x><r_x| + (1 - nu) I / 2`.
pub fn cube_construction(nu: f64) -> Result<(StateEnsemble, MeasurementSet)> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::RangeViolation(format!("nu = {nu} outside [0, 1]")));
    }
    let ms = MeasurementSet::new(vec![
        Povm::qubit_projective([0.0, 0.0, 1.0]),
        Povm::qubit_projective([1.0, 0.0, 0.0]),
        Povm::qubit_projective([0.0, 1.0, 0.0]),
    ])?;
    let sc = Scenario::uniform(3, 2, 2)?;
    let id = CMatrix::identity(2);
    let states = sc
        .inputs()
        .iter()
        .map(|x| {
            let r = cube_vector(x);
            let sigma = &(&pauli_x().scale(r[0]) + &pauli_y().scale(r[1])) + &pauli_z().scale(r[2]);
            (&id + &sigma.scale(nu)).scale(0.5)
        })
        .collect();
    Ok((StateEnsemble::from_unchecked(states), ms))
}
