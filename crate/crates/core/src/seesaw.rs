//! See-saw search over states and measurements.
//!
//! Each round first optimizes the states for fixed measurements, then the
//! measurements (or, under the compatibility constraint, their parent POVM)
//! for fixed states. Results are lower bounds found heuristically.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compat::{
    induce, project_to_povm, random_parent, random_povm, ParentPovm, PostProcessing, TupleIndexer,
    MAX_PARENT_OUTCOMES,
};
use crate::error::{Error, Result};
use crate::operator::{eigh, top_eigenpair, CMatrix, HermitianOperator, MeasurementSet, Povm};
use crate::quantum::{probability_table, StateEnsemble};
use crate::scenario::{score, Objective, Scenario};
use crate::tolerance::ToleranceConfig;

/// Label attached to every see-saw result.
pub const HEURISTIC: &str = "HEURISTIC";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Constraint {
    /// Any POVMs.
    Free,
    /// Marginals of a common parent POVM.
    Compatible,
}

#[derive(Clone, Debug)]
pub struct SeesawSettings {
    pub restarts: usize,
    pub seed: u64,
    pub max_rounds: usize,
    /// Stop when a round changes the value by less than this.
    pub tolerance: f64,
    /// Multiplicative-weights iterations in the worst-case state step.
    pub mw_iterations: usize,
    pub mw_rate: f64,
    pub mw_floor: f64,
    /// Projected-gradient steps per measurement step.
    pub gradient_steps: usize,
    /// Measurements used by the first restart instead of random ones.
    pub initial: Option<MeasurementSet>,
}

impl SeesawSettings {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            max_rounds: 500,
            tolerance: 1e-9,
            mw_iterations: 100,
            mw_rate: 0.1,
            mw_floor: 1e-6,
            gradient_steps: 10,
            initial: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartLog {
    pub seed: u64,
    pub value: f64,
    pub rounds: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeesawResult {
    pub value: f64,
    pub objective: Objective,
    pub constraint: Constraint,
    #[serde(skip)]
    pub ensemble: StateEnsemble,
    #[serde(skip)]
    pub measurements: MeasurementSet,
    #[serde(skip)]
    pub parent: Option<ParentPovm>,
    pub restarts: Vec<RestartLog>,
    pub label: &'static str,
}

struct Problem<'a> {
    sc: &'a Scenario,
    inputs: Vec<Vec<usize>>,
    objective: Objective,
    constraint: Constraint,
    tuples: Vec<Vec<usize>>,
    settings: &'a SeesawSettings,
}

/// Softmin sharpness schedule for the worst-case objective.
fn sharpness(round: usize) -> f64 {
    (30.0 * 1.1f64.powi(round as i32)).min(3000.0)
}

/// Smooth surrogate of the objective and its weights over cells.
fn surrogate(cells: &[f64], objective: Objective, beta: f64) -> (f64, Vec<f64>) {
    let n = cells.len() as f64;
    match objective {
        Objective::Average => (cells.iter().sum::<f64>() / n, vec![1.0 / n; cells.len()]),
        Objective::Worst => {
            let m = cells.iter().copied().fold(f64::INFINITY, f64::min);
            let e: Vec<f64> = cells.iter().map(|c| (-beta * (c - m)).exp()).collect();
            let z: f64 = e.iter().sum();
            (m - (z / n).ln() / beta, e.into_iter().map(|v| v / z).collect())
        }
    }
}

fn objective_value(cells: &[f64], objective: Objective) -> f64 {
    match objective {
        Objective::Average => cells.iter().sum::<f64>() / cells.len() as f64,
        Objective::Worst => cells.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Euclidean projection onto density matrices.
fn project_density(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh(&m.hermitian_part(), ToleranceConfig::default().eigen_off_diagonal)?;
    let mut sorted = e.values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    Ok(e.reconstruct(|l| (l - theta).max(0.0)))
}

/// Normalized projected-gradient ascent with backtracking. `eval` returns the
/// value and gradient at a point; `project` maps back onto the feasible set.
fn ascend<E, P>(vars: &mut Vec<CMatrix>, steps: usize, eval: E, project: P) -> Result<()>
where
    E: Fn(&[CMatrix]) -> (f64, Vec<CMatrix>),
    P: Fn(&[CMatrix]) -> Result<Vec<CMatrix>>,
{
    let mut eta = 0.1;
    let (mut value, mut grad) = eval(vars);
    for _ in 0..steps {
        let norm = grad.iter().map(CMatrix::frobenius_sq).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return Ok(());
        }
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<CMatrix> = vars
                .iter()
                .zip(&grad)
                .map(|(v, g)| {
                    let mut t = v.clone();
                    t.axpy(eta / norm, g);
                    t
                })
                .collect();
            let candidate = project(&trial)?;
            let (cv, cg) = eval(&candidate);
            if cv > value {
                *vars = candidate;
                value = cv;
                grad = cg;
                eta = (eta * 2.0).min(1.0);
                accepted = true;
                break;
            }
            eta *= 0.5;
            if eta < 1e-12 {
                break;
            }
        }
        if !accepted {
            return Ok(());
        }
    }
    Ok(())
}

struct Iterate {
    states: Vec<CMatrix>,
    vars: Vec<CMatrix>,
    value: f64,
}

impl<'a> Problem<'a> {
    fn measurements(&self, vars: &[CMatrix]) -> Vec<Vec<CMatrix>> {
        match self.constraint {
            Constraint::Free => {
                let mut out = Vec::with_capacity(self.sc.n());
                let mut start = 0;
                for &d in self.sc.outcomes() {
                    out.push(vars[start..start + d].to_vec());
                    start += d;
                }
                out
            }
            Constraint::Compatible => {
                let dim = self.sc.dim();
                let mut out: Vec<Vec<CMatrix>> = self
                    .sc
                    .outcomes()
                    .iter()
                    .map(|&d| vec![CMatrix::zeros(dim); d])
                    .collect();
                for (g, t) in vars.iter().zip(&self.tuples) {
                    for (y, &b) in t.iter().enumerate() {
                        out[y][b] += g;
                    }
                }
                out
            }
        }
    }

    fn cells(&self, states: &[CMatrix], meas: &[Vec<CMatrix>]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.sc.normalizer());
        for (rho, x) in states.iter().zip(&self.inputs) {
            for (y, &xy) in x.iter().enumerate() {
                out.push(rho.trace_product(&meas[y][xy]));
            }
        }
        out
    }

    fn project_vars(&self, vars: &[CMatrix]) -> Result<Vec<CMatrix>> {
        match self.constraint {
            Constraint::Free => {
                let mut out = Vec::with_capacity(vars.len());
                let mut start = 0;
                for &d in self.sc.outcomes() {
                    out.extend(project_to_povm(&vars[start..start + d], 200)?);
                    start += d;
                }
                Ok(out)
            }
            Constraint::Compatible => project_to_povm(vars, 200),
        }
    }

    fn state_step(&self, states: &mut [CMatrix], meas: &[Vec<CMatrix>], beta: f64) -> Result<()> {
        for (rho, x) in states.iter_mut().zip(&self.inputs) {
            let effects: Vec<&CMatrix> = x.iter().enumerate().map(|(y, &xy)| &meas[y][xy]).collect();
            match self.objective {
                Objective::Average => {
                    let mut chi = CMatrix::zeros(self.sc.dim());
                    for e in &effects {
                        chi += *e;
                    }
                    let (_, v) = top_eigenpair(&HermitianOperator::from_hermitian(chi))?;
                    *rho = v.projector();
                }
                Objective::Worst => {
                    let worst = |r: &CMatrix| {
                        effects
                            .iter()
                            .map(|e| r.trace_product(e))
                            .fold(f64::INFINITY, f64::min)
                    };
                    let mut best = rho.clone();
                    let mut best_value = worst(rho);
                    let candidate = self.maxmin_state(&effects, beta)?;
                    let cv = worst(&candidate);
                    if cv > best_value {
                        best = candidate;
                        best_value = cv;
                    }
                    let _ = best_value;
                    *rho = best;
                }
            }
        }
        Ok(())
    }

    /// Approximately maximizes `min_y Tr(rho E_y)` over density matrices:
    /// multiplicative weights over `y`, then a softmin polish.
    fn maxmin_state(&self, effects: &[&CMatrix], beta: f64) -> Result<CMatrix> {
        let s = self.settings;
        let n = effects.len();
        let dim = self.sc.dim();
        let mut w = vec![1.0 / n as f64; n];
        let mut average = CMatrix::zeros(dim);
        for _ in 0..s.mw_iterations.max(1) {
            let mut h = CMatrix::zeros(dim);
            for (wy, e) in w.iter().zip(effects) {
                h.axpy(*wy, e);
            }
            let (_, v) = top_eigenpair(&HermitianOperator::from_hermitian(h))?;
            let rho = v.projector();
            for (wy, e) in w.iter_mut().zip(effects) {
                *wy *= (-s.mw_rate * rho.trace_product(e)).exp();
            }
            let total: f64 = w.iter().sum();
            for wy in w.iter_mut() {
                *wy = (*wy / total).max(s.mw_floor);
            }
            let total: f64 = w.iter().sum();
            for wy in w.iter_mut() {
                *wy /= total;
            }
            average += &rho;
        }
        let mut vars = vec![average.scale(1.0 / s.mw_iterations.max(1) as f64)];
        let eval = |v: &[CMatrix]| {
            let cells: Vec<f64> = effects.iter().map(|e| v[0].trace_product(e)).collect();
            let (val, weights) = surrogate(&cells, Objective::Worst, beta);
            let mut g = CMatrix::zeros(dim);
            for (wy, e) in weights.iter().zip(effects) {
                g.axpy(*wy, e);
            }
            (val, vec![g])
        };
        ascend(&mut vars, 20, eval, |v| Ok(vec![project_density(&v[0])?]))?;
        Ok(vars.pop().unwrap())
    }

    fn measurement_step(&self, states: &[CMatrix], vars: &mut Vec<CMatrix>, beta: f64) -> Result<()> {
        let binary = self.sc.outcomes().iter().all(|&d| d == 2);
        if self.constraint == Constraint::Free && self.objective == Objective::Average && binary {
            // exact best response: project onto the positive part of B_0 - B_1
            let dim = self.sc.dim();
            for y in 0..self.sc.n() {
                let mut diff = CMatrix::zeros(dim);
                for (rho, x) in states.iter().zip(&self.inputs) {
                    if x[y] == 0 {
                        diff += rho;
                    } else {
                        diff -= rho;
                    }
                }
                let e = eigh(&diff, ToleranceConfig::default().eigen_off_diagonal)?;
                let m0 = e.reconstruct(|l| if l > 0.0 { 1.0 } else { 0.0 });
                let m1 = &CMatrix::identity(dim) - &m0;
                vars[2 * y] = m0;
                vars[2 * y + 1] = m1;
            }
            return Ok(());
        }
        let eval = |v: &[CMatrix]| {
            let meas = self.measurements(v);
            let cells = self.cells(states, &meas);
            let (val, weights) = surrogate(&cells, self.objective, beta);
            let dim = self.sc.dim();
            let mut grad_m: Vec<Vec<CMatrix>> = self
                .sc
                .outcomes()
                .iter()
                .map(|&d| vec![CMatrix::zeros(dim); d])
                .collect();
            let n = self.sc.n();
            for (xi, (rho, x)) in states.iter().zip(&self.inputs).enumerate() {
                for (y, &xy) in x.iter().enumerate() {
                    grad_m[y][xy].axpy(weights[xi * n + y], rho);
                }
            }
            let grad = match self.constraint {
                Constraint::Free => grad_m.into_iter().flatten().collect(),
                Constraint::Compatible => self
                    .tuples
                    .iter()
                    .map(|t| {
                        let mut g = CMatrix::zeros(dim);
                        for (y, &b) in t.iter().enumerate() {
                            g += &grad_m[y][b];
                        }
                        g
                    })
                    .collect(),
            };
            (val, grad)
        };
        ascend(vars, self.settings.gradient_steps, eval, |v| self.project_vars(v))
    }

    fn initial_vars(&self, rng: &mut ChaCha8Rng, initial: Option<&MeasurementSet>) -> Vec<CMatrix> {
        let dim = self.sc.dim();
        match (self.constraint, initial) {
            (Constraint::Free, Some(ms)) => ms
                .povms()
                .iter()
                .flat_map(|p| (0..p.outcomes()).map(|b| p.effect(b).clone()).collect::<Vec<_>>())
                .collect(),
            (Constraint::Free, None) => self
                .sc
                .outcomes()
                .iter()
                .flat_map(|&d| {
                    let p = random_povm(dim, d, rng);
                    (0..d).map(|b| p.effect(b).clone()).collect::<Vec<_>>()
                })
                .collect(),
            (Constraint::Compatible, _) => random_parent(dim, self.sc.outcomes(), rng).effects().to_vec(),
        }
    }

    fn run(&self, seed: u64, initial: Option<&MeasurementSet>) -> Result<(Iterate, RestartLog)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vars = self.initial_vars(&mut rng, initial);
        let dim = self.sc.dim();
        let mut states = vec![CMatrix::identity(dim).scale(1.0 / dim as f64); self.inputs.len()];
        let mut best: Option<Iterate> = None;
        let mut previous = f64::NEG_INFINITY;
        let mut converged = false;
        let mut rounds = 0;
        while rounds < self.settings.max_rounds {
            let beta = sharpness(rounds);
            rounds += 1;
            let meas = self.measurements(&vars);
            self.state_step(&mut states, &meas, beta)?;
            self.measurement_step(&states, &mut vars, beta)?;
            let value = objective_value(&self.cells(&states, &self.measurements(&vars)), self.objective);
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(Iterate {
                    states: states.clone(),
                    vars: vars.clone(),
                    value,
                });
            }
            let settled = self.objective == Objective::Average || beta >= 3000.0;
            if settled && (value - previous).abs() < self.settings.tolerance {
                converged = true;
                break;
            }
            previous = value;
        }
        let best = best.expect("at least one round runs");
        let log = RestartLog {
            seed,
            value: best.value,
            rounds,
            converged,
        };
        Ok((best, log))
    }
}

/// Best value of `objective` found over `settings.restarts` see-saw runs.
pub fn seesaw(
    sc: &Scenario,
    objective: Objective,
    constraint: Constraint,
    settings: &SeesawSettings,
) -> Result<SeesawResult> {
    if settings.restarts == 0 {
        return Err(Error::RangeViolation("at least one restart is required".into()));
    }
    if constraint == Constraint::Compatible {
        let k: usize = sc.outcomes().iter().product();
        if k > MAX_PARENT_OUTCOMES {
            return Err(Error::TooLarge {
                count: k as u128,
                limit: MAX_PARENT_OUTCOMES as u128,
            });
        }
    }
    if let Some(ms) = &settings.initial {
        if ms.outcome_profile() != sc.outcomes() || ms.dim() != sc.dim() {
            return Err(Error::ShapeMismatch("initial measurements do not match the scenario".into()));
        }
    }
    let problem = Problem {
        sc,
        inputs: sc.inputs(),
        objective,
        constraint,
        tuples: TupleIndexer::new(sc.outcomes()).all_tuples(),
        settings,
    };
    let runs = (0..settings.restarts)
        .into_par_iter()
        .map(|r| {
            let initial = if r == 0 { settings.initial.as_ref() } else { None };
            problem.run(settings.seed.wrapping_add(r as u64), initial)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best_index = 0;
    for (i, (it, log)) in runs.iter().enumerate() {
        let (b, blog) = (&runs[best_index].0, &runs[best_index].1);
        if it.value > b.value || (it.value == b.value && log.seed < blog.seed) {
            best_index = i;
        }
    }
    let logs: Vec<RestartLog> = runs.iter().map(|(_, l)| l.clone()).collect();
    let best = runs.into_iter().nth(best_index).unwrap().0;

    let tol = ToleranceConfig::default();
    let (measurements, parent) = match constraint {
        Constraint::Free => {
            let meas = problem.measurements(&best.vars);
            (MeasurementSet::from_effects(meas, &tol)?, None)
        }
        Constraint::Compatible => {
            let parent = ParentPovm::new(sc.outcomes().to_vec(), best.vars.clone(), &tol)?;
            let ms = induce(&parent, &PostProcessing::deterministic(sc.outcomes()))?;
            (ms, Some(parent))
        }
    };
    let ensemble = StateEnsemble::new(best.states, &tol)?;
    let value = score(&probability_table(&ensemble, &measurements)?, objective);
    Ok(SeesawResult {
        value,
        objective,
        constraint,
        ensemble,
        measurements,
        parent,
        restarts: logs,
        label: HEURISTIC,
    })
}

/// Measurements near the three Pauli bases, for warm starts.
pub fn perturbed_pauli_triple(epsilon: f64) -> Result<MeasurementSet> {
    let axis = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    MeasurementSet::new(vec![
        Povm::qubit_projective(axis([epsilon, 0.0, 1.0])),
        Povm::qubit_projective(axis([1.0, epsilon, 0.0])),
        Povm::qubit_projective(axis([0.0, 1.0, epsilon])),
    ])
}
