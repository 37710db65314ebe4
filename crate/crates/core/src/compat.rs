//! Parent POVMs, post-processings and a numerical joint-measurability test.
//!
//! A set of measurements is compatible when a single parent POVM with
//! outcomes in `[d_1] x .. x [d_n]` reproduces every measurement as a
//! marginal. `feasibility_check` searches for such a parent with Dykstra's
//! alternating projections between the PSD cones and the affine marginal
//! constraints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{
    eigh, inverse_sqrt, project_psd, random_ginibre, validate_povm, CMatrix, MeasurementSet, Povm,
};
use crate::report::WitnessReport;
use crate::tolerance::ToleranceConfig;

/// Largest parent outcome count handled by the solver and the generator.
pub const MAX_PARENT_OUTCOMES: usize = 4096;

/// Mixed-radix indexing of outcome tuples, first slot most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleIndexer {
    profile: Vec<usize>,
    len: usize,
}

impl TupleIndexer {
    pub fn new(profile: &[usize]) -> Self {
        Self {
            profile: profile.to_vec(),
            len: profile.iter().product(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; self.profile.len()];
        for (slot, &d) in t.iter_mut().zip(&self.profile).rev() {
            *slot = index % d;
            index /= d;
        }
        t
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.profile)
            .fold(0, |acc, (&b, &d)| acc * d + b)
    }

    /// `table[k][y]` is slot `y` of tuple `k`.
    pub fn all_tuples(&self) -> Vec<Vec<usize>> {
        (0..self.len).map(|k| self.tuple(k)).collect()
    }
}

/// POVM whose outcomes are tuples `(b_1, .., b_n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParentPovm {
    dim: usize,
    profile: Vec<usize>,
    effects: Vec<CMatrix>,
}

impl ParentPovm {
    pub fn new(profile: Vec<usize>, effects: Vec<CMatrix>, tol: &ToleranceConfig) -> Result<Self> {
        let expected: usize = profile.iter().product();
        if effects.len() != expected || expected == 0 {
            return Err(Error::ShapeMismatch(format!(
                "parent with profile {profile:?} needs {expected} effects, got {}",
                effects.len()
            )));
        }
        validate_povm(effects.clone(), tol)?;
        Ok(Self {
            dim: effects[0].dim(),
            profile,
            effects: effects.iter().map(CMatrix::hermitian_part).collect(),
        })
    }

    pub(crate) fn from_unchecked(profile: Vec<usize>, effects: Vec<CMatrix>) -> Self {
        Self {
            dim: effects[0].dim(),
            profile,
            effects,
        }
    }

    /// Every effect equal to `I / K`.
    pub fn uniform(dim: usize, profile: Vec<usize>) -> Self {
        let k: usize = profile.iter().product();
        let e = CMatrix::identity(dim).scale(1.0 / k as f64);
        Self::from_unchecked(profile, vec![e; k])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn indexer(&self) -> TupleIndexer {
        TupleIndexer::new(&self.profile)
    }

    /// Largest deviation from the marginal constraints for `ms`, in operator
    /// norm, together with the most negative eigenvalue among the effects.
    pub fn marginal_residual(&self, ms: &MeasurementSet) -> Result<f64> {
        if ms.outcome_profile() != self.profile || ms.dim() != self.dim {
            return Err(Error::ShapeMismatch("parent does not match measurement set".into()));
        }
        let sums = marginal_sums(&self.effects, &self.indexer());
        let mut worst: f64 = 0.0;
        for (y, row) in sums.iter().enumerate() {
            for (b, m) in row.iter().enumerate() {
                worst = worst.max(op_norm(&(m - ms.povm(y).effect(b)))?);
            }
        }
        for e in &self.effects {
            let lo = eigh(e, ToleranceConfig::default().eigen_off_diagonal)?.values[0];
            worst = worst.max(-lo);
        }
        let total = self.effects.iter().fold(CMatrix::zeros(self.dim), |acc, e| &acc + e);
        worst = worst.max(op_norm(&(&total - &CMatrix::identity(self.dim)))?);
        Ok(worst)
    }
}

/// Classical channels `P_y(b | kappa)` from parent outcomes to each
/// measurement's outcomes. `tables[y][kappa][b]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PostProcessing {
    tables: Vec<Vec<Vec<f64>>>,
}

impl PostProcessing {
    pub fn new(tables: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        for (y, t) in tables.iter().enumerate() {
            let d = t.first().map_or(0, Vec::len);
            for (k, row) in t.iter().enumerate() {
                if row.len() != d || d == 0 {
                    return Err(Error::ShapeMismatch(format!(
                        "post-processing {y} row {k} has {} entries, expected {d}",
                        row.len()
                    )));
                }
                if row.iter().any(|&p| p < 0.0 || !p.is_finite()) {
                    return Err(Error::RangeViolation(format!(
                        "post-processing {y} row {k} has a negative entry"
                    )));
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::RangeViolation(format!(
                        "post-processing {y} row {k} sums to {s}"
                    )));
                }
            }
        }
        Ok(Self { tables })
    }

    /// `P_y(b | kappa) = [kappa_y = b]`, which turns `induce` into marginals.
    pub fn deterministic(profile: &[usize]) -> Self {
        let idx = TupleIndexer::new(profile);
        let tables = profile
            .iter()
            .enumerate()
            .map(|(y, &d)| {
                (0..idx.len())
                    .map(|k| {
                        let mut row = vec![0.0; d];
                        row[idx.tuple(k)[y]] = 1.0;
                        row
                    })
                    .collect()
            })
            .collect();
        Self { tables }
    }

    pub fn tables(&self) -> &[Vec<Vec<f64>>] {
        &self.tables
    }
}

fn op_norm(m: &CMatrix) -> Result<f64> {
    let e = eigh(m, ToleranceConfig::default().eigen_off_diagonal)?;
    Ok(e.values[0].abs().max(e.values[e.values.len() - 1].abs()))
}

/// `sums[y][b] = sum_{kappa : kappa_y = b} G_kappa`.
fn marginal_sums(effects: &[CMatrix], idx: &TupleIndexer) -> Vec<Vec<CMatrix>> {
    let dim = effects[0].dim();
    let mut sums: Vec<Vec<CMatrix>> = idx
        .profile()
        .iter()
        .map(|&d| vec![CMatrix::zeros(dim); d])
        .collect();
    for (k, g) in effects.iter().enumerate() {
        for (y, &b) in idx.tuple(k).iter().enumerate() {
            sums[y][b] += g;
        }
    }
    sums
}

/// Marginal of a parent on slot `y`.
pub fn marginalize(parent: &ParentPovm, y: usize) -> Result<Povm> {
    if y >= parent.profile.len() {
        return Err(Error::IndexOutOfRange {
            index: y,
            len: parent.profile.len(),
        });
    }
    let idx = parent.indexer();
    let mut effects = vec![CMatrix::zeros(parent.dim); parent.profile[y]];
    for (k, g) in parent.effects.iter().enumerate() {
        effects[idx.tuple(k)[y]] += g;
    }
    validate_povm(effects, &ToleranceConfig::default())
}

/// The measurements `M_{b|y} = sum_kappa P_y(b | kappa) G_kappa`.
pub fn induce(parent: &ParentPovm, post: &PostProcessing) -> Result<MeasurementSet> {
    let k = parent.effects.len();
    if post.tables.is_empty() {
        return Err(Error::ShapeMismatch("post-processing is empty".into()));
    }
    let mut povms = Vec::with_capacity(post.tables.len());
    for (y, table) in post.tables.iter().enumerate() {
        if table.len() != k {
            return Err(Error::ShapeMismatch(format!(
                "post-processing {y} has {} rows, parent has {k} outcomes",
                table.len()
            )));
        }
        let d = table[0].len();
        let mut effects = vec![CMatrix::zeros(parent.dim); d];
        for (g, row) in parent.effects.iter().zip(table) {
            for (e, &p) in effects.iter_mut().zip(row) {
                if p != 0.0 {
                    e.axpy(p, g);
                }
            }
        }
        povms.push(validate_povm(effects, &ToleranceConfig::default())?);
    }
    MeasurementSet::new(povms)
}

/// Parent with effects `S^{-1/2} A A^dagger S^{-1/2}` for Ginibre `A`.
pub fn random_parent<R: Rng + ?Sized>(dim: usize, profile: &[usize], rng: &mut R) -> ParentPovm {
    let k: usize = profile.iter().product();
    let raw: Vec<CMatrix> = (0..k)
        .map(|_| {
            let a = random_ginibre(dim, rng);
            &a * &a.adjoint()
        })
        .collect();
    let effects = normalize_to_identity(&raw).expect("Ginibre sums are positive definite");
    ParentPovm::from_unchecked(profile.to_vec(), effects)
}

pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Povm {
    let p = random_parent(dim, &[outcomes], rng);
    Povm::from_effects_unchecked(p.effects)
}

/// `S^{-1/2} G S^{-1/2}` with `S = sum G`, so that the result sums to `I`.
fn normalize_to_identity(effects: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let dim = effects[0].dim();
    let total = effects.iter().fold(CMatrix::zeros(dim), |acc, e| &acc + e);
    let s = inverse_sqrt(&total)?;
    Ok(effects
        .iter()
        .map(|g| (&(&s * g) * &s).hermitian_part())
        .collect())
}

/// A random compatible set together with the parent and post-processing
/// that generated it.
pub fn random_compatible_set(
    dim: usize,
    profile: &[usize],
    seed: u64,
) -> Result<(MeasurementSet, ParentPovm, PostProcessing)> {
    let k: usize = profile.iter().product();
    if k > MAX_PARENT_OUTCOMES {
        return Err(Error::TooLarge {
            count: k as u128,
            limit: MAX_PARENT_OUTCOMES as u128,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parent = random_parent(dim, profile, &mut rng);
    let tables = profile
        .iter()
        .map(|&d| {
            (0..k)
                .map(|_| {
                    let w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|v| v / s).collect()
                })
                .collect()
        })
        .collect();
    let post = PostProcessing { tables };
    let ms = induce(&parent, &post)?;
    Ok((ms, parent, post))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CompatibilityStatus {
    Compatible,
    Incompatible,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub max_iterations: usize,
    /// Residual at or below which a certificate is accepted.
    pub tolerance: f64,
    /// Iterations between certificate checks.
    pub check_every: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            tolerance: ToleranceConfig::default().feasibility,
            check_every: 10,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityVerdict {
    pub status: CompatibilityStatus,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ParentPovm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Box<WitnessReport>>,
    pub iterations: usize,
    /// Frobenius distance of each PSD iterate from the affine constraints.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// Least-squares projection onto `{G : marginals of G = targets}`, applied to
/// every matrix entry independently.
struct AffineProjector {
    idx: TupleIndexer,
    tuples: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    /// Pseudo-inverse of `A A^T` for the tuple/marginal incidence matrix `A`.
    gram_pinv: Vec<Vec<f64>>,
}

impl AffineProjector {
    fn new(profile: &[usize]) -> Result<Self> {
        let idx = TupleIndexer::new(profile);
        let k = idx.len() as f64;
        let mut offsets = Vec::with_capacity(profile.len());
        let mut rows = 0;
        for &d in profile {
            offsets.push(rows);
            rows += d;
        }
        let mut gram = vec![0.0; rows * rows];
        for (y, &dy) in profile.iter().enumerate() {
            for (z, &dz) in profile.iter().enumerate() {
                for b in 0..dy {
                    for c in 0..dz {
                        let v = if y == z {
                            if b == c {
                                k / dy as f64
                            } else {
                                0.0
                            }
                        } else {
                            k / (dy * dz) as f64
                        };
                        gram[(offsets[y] + b) * rows + offsets[z] + c] = v;
                    }
                }
            }
        }
        let e = eigh(&CMatrix::from_real(rows, &gram), 1e-15)?;
        let top = e.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let pinv = e.reconstruct(|l| if l > 1e-10 * top { 1.0 / l } else { 0.0 });
        let gram_pinv = (0..rows)
            .map(|i| (0..rows).map(|j| pinv.get(i, j).re).collect())
            .collect();
        Ok(Self {
            tuples: idx.all_tuples(),
            idx,
            offsets,
            gram_pinv,
        })
    }

    /// Projects `g` in place and returns the Frobenius norm of the violation
    /// before projection.
    fn project(&self, g: &mut [CMatrix], targets: &[Vec<CMatrix>]) -> f64 {
        let dim = g[0].dim();
        let sums = marginal_sums(g, &self.idx);
        let mut residuals = Vec::with_capacity(self.gram_pinv.len());
        let mut violation = 0.0;
        for (row, trow) in sums.iter().zip(targets) {
            for (m, t) in row.iter().zip(trow) {
                let r = m - t;
                violation += r.frobenius_sq();
                residuals.push(r);
            }
        }
        let corrections: Vec<CMatrix> = self
            .gram_pinv
            .iter()
            .map(|w| {
                let mut c = CMatrix::zeros(dim);
                for (wi, r) in w.iter().zip(&residuals) {
                    if *wi != 0.0 {
                        c.axpy(*wi, r);
                    }
                }
                c
            })
            .collect();
        for (gk, t) in g.iter_mut().zip(&self.tuples) {
            for (y, &b) in t.iter().enumerate() {
                *gk -= &corrections[self.offsets[y] + b];
            }
        }
        violation.sqrt()
    }
}

/// Searches for a parent POVM reproducing `ms`.
///
/// A COMPATIBLE verdict carries a parent whose effects are PSD and sum to the
/// identity, with marginals within `settings.tolerance` of `ms` in operator
/// norm. Failure to find one yields INDETERMINATE, never INCOMPATIBLE.
pub fn feasibility_check(ms: &MeasurementSet, settings: &SolverSettings) -> Result<CompatibilityVerdict> {
    let profile = ms.outcome_profile();
    let k: usize = profile.iter().product();
    if k > MAX_PARENT_OUTCOMES {
        return Err(Error::TooLarge {
            count: k as u128,
            limit: MAX_PARENT_OUTCOMES as u128,
        });
    }
    if let Some(parent) = structured_parent(ms)? {
        let residual = parent.marginal_residual(ms)?;
        if residual <= settings.tolerance {
            return Ok(CompatibilityVerdict {
                status: CompatibilityStatus::Compatible,
                residual,
                certificate: Some(parent),
                witness: None,
                iterations: 0,
                history: Vec::new(),
            });
        }
    }

    let dim = ms.dim();
    let targets: Vec<Vec<CMatrix>> = ms
        .povms()
        .iter()
        .map(|p| (0..p.outcomes()).map(|b| p.effect(b).clone()).collect())
        .collect();
    let affine = AffineProjector::new(&profile)?;
    let mut x = vec![CMatrix::identity(dim).scale(1.0 / k as f64); k];
    let mut correction = vec![CMatrix::zeros(dim); k];
    let mut history = Vec::new();
    let mut best: Option<(f64, ParentPovm)> = None;
    let check_every = settings.check_every.max(1);
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        iterations += 1;
        let violation = affine.project(&mut x, &targets);
        if iterations > 1 {
            history.push(violation);
        }
        for (xk, pk) in x.iter_mut().zip(correction.iter_mut()) {
            let shifted = &*xk + &*pk;
            let z = project_psd(&shifted)?;
            *pk = &shifted - &z;
            *xk = z;
        }
        if iterations % check_every == 0 || iterations == settings.max_iterations {
            if let Some(candidate) = repair(&profile, &x) {
                let residual = candidate.marginal_residual(ms)?;
                let improved = best.as_ref().is_none_or(|(r, _)| residual < *r);
                if improved {
                    best = Some((residual, candidate));
                }
                if residual <= settings.tolerance {
                    break;
                }
            }
        }
    }

    Ok(match best {
        Some((residual, parent)) if residual <= settings.tolerance => CompatibilityVerdict {
            status: CompatibilityStatus::Compatible,
            residual,
            certificate: Some(parent),
            witness: None,
            iterations,
            history,
        },
        other => CompatibilityVerdict {
            status: CompatibilityStatus::Indeterminate,
            residual: other.map_or(f64::INFINITY, |(r, _)| r),
            certificate: None,
            witness: None,
            iterations,
            history,
        },
    })
}

/// Turns a PSD iterate into an exact POVM by congruence with `S^{-1/2}`.
fn repair(profile: &[usize], effects: &[CMatrix]) -> Option<ParentPovm> {
    let normalized = normalize_to_identity(effects).ok()?;
    let effects = normalized
        .iter()
        .map(project_psd)
        .collect::<Result<Vec<_>>>()
        .ok()?;
    Some(ParentPovm::from_unchecked(profile.to_vec(), effects))
}

/// Parents available in closed form: when the distinct measurements commute
/// with one another, the products of their effects form a joint measurement.
///
/// Alternating projections converge slowly onto such sets, whose parent is
/// often unique and sits on the boundary of the PSD cone.
fn structured_parent(ms: &MeasurementSet) -> Result<Option<ParentPovm>> {
    let tol = 1e-12;
    let same = |a: &Povm, b: &Povm| {
        a.outcomes() == b.outcomes()
            && (0..a.outcomes()).all(|i| a.effect(i).max_abs_diff(b.effect(i)) <= tol)
    };
    let mut distinct: Vec<usize> = Vec::new();
    let mut class = Vec::with_capacity(ms.len());
    for p in ms.povms() {
        match distinct.iter().position(|&u| same(ms.povm(u), p)) {
            Some(c) => class.push(c),
            None => {
                class.push(distinct.len());
                distinct.push(class.len() - 1);
            }
        }
    }
    for (i, &u) in distinct.iter().enumerate() {
        for &v in &distinct[i + 1..] {
            for a in ms.povm(u).effects() {
                for b in ms.povm(v).effects() {
                    let (a, b) = (a.matrix(), b.matrix());
                    if (&(a * b) - &(b * a)).max_abs() > tol {
                        return Ok(None);
                    }
                }
            }
        }
    }
    let reduced: Vec<usize> = distinct.iter().map(|&u| ms.povm(u).outcomes()).collect();
    let reduced_idx = TupleIndexer::new(&reduced);
    let products: Vec<CMatrix> = (0..reduced_idx.len())
        .map(|c| {
            let t = reduced_idx.tuple(c);
            let mut acc = CMatrix::identity(ms.dim());
            for (slot, &u) in distinct.iter().enumerate() {
                acc = &acc * ms.povm(u).effect(t[slot]);
            }
            acc.hermitian_part()
        })
        .collect();
    let profile = ms.outcome_profile();
    let idx = TupleIndexer::new(&profile);
    let mut effects = vec![CMatrix::zeros(ms.dim()); idx.len()];
    for (c, prod) in products.into_iter().enumerate() {
        let t = reduced_idx.tuple(c);
        let full: Vec<usize> = class.iter().map(|&cl| t[cl]).collect();
        effects[idx.index(&full)] = project_psd(&prod)?;
    }
    Ok(Some(ParentPovm::from_unchecked(profile, effects)))
}

/// Euclidean projection of `effects` onto the set of POVMs with that many
/// outcomes (PSD effects summing to the identity), by Dykstra's method.
pub fn project_to_povm(effects: &[CMatrix], max_iterations: usize) -> Result<Vec<CMatrix>> {
    let k = effects.len();
    let dim = effects[0].dim();
    let id = CMatrix::identity(dim);
    let mut x: Vec<CMatrix> = effects.to_vec();
    let mut correction = vec![CMatrix::zeros(dim); k];
    for _ in 0..max_iterations {
        let total = x.iter().fold(CMatrix::zeros(dim), |acc, e| &acc + e);
        let shift = (&total - &id).scale(1.0 / k as f64);
        let mut change: f64 = 0.0;
        for (xk, pk) in x.iter_mut().zip(correction.iter_mut()) {
            let y = &*xk - &shift;
            let shifted = &y + &*pk;
            let z = project_psd(&shifted)?;
            *pk = &shifted - &z;
            change = change.max(z.max_abs_diff(xk));
            *xk = z;
        }
        if change < 1e-13 {
            break;
        }
    }
    match normalize_to_identity(&x) {
        Ok(v) => v.iter().map(project_psd).collect(),
        Err(_) => {
            // Degenerate sum: fall back to mixing with the trivial POVM.
            let mixed: Vec<CMatrix> = x
                .iter()
                .map(|e| &e.scale(0.999) + &id.scale(0.001 / k as f64))
                .collect();
            normalize_to_identity(&mixed)
        }
    }
}
