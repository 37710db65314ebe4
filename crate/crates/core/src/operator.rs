//! Dense complex matrices, Hermitian operators, POVMs and the small
//! eigensolvers everything else is built on.
//!
//! Dimensions in this crate are tiny (qubits and qutrits, occasionally up to
//! a few dozen), so matrices are plain row-major `Vec`s. Two-dimensional
//! Hermitian problems use the closed form; larger ones use cyclic complex
//! Jacobi rotations.

use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from rows; fails unless every row has `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare {
                index: 0,
                expected: dim,
            });
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    /// Rank-one operator `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Re Tr(self * other)`, the Hilbert-Schmidt pairing for Hermitian arguments.
    pub fn trace_product(&self, other: &CMatrix) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                let b = other.data[k * n + i];
                acc += a.re * b.re - a.im * b.im;
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Max deviation between the matrix and its conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
            }
        }
        m
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    /// `Re <v|M|v>`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn axpy(&mut self, s: f64, other: &CMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// Spectral decomposition with eigenvalues in ascending order; eigenvectors
/// are the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        let n = self.vectors.dim;
        (0..n).map(|i| self.vectors.get(i, k)).collect()
    }

    /// Rebuilds `sum_k f(lambda_k) |v_k><v_k|`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.dim;
        let mut out = CMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors.get(i, k) * w;
                for j in 0..n {
                    out.data[i * n + j] += vi * self.vectors.get(j, k).conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix (only the Hermitian part is read).
pub fn eigh(m: &CMatrix, off_tol: f64) -> Result<Eigen> {
    match m.dim {
        1 => Ok(Eigen {
            values: vec![m.get(0, 0).re],
            vectors: CMatrix::identity(1),
        }),
        2 => Ok(eigh2(m)),
        _ => jacobi(m, off_tol),
    }
}

fn eigh2(m: &CMatrix) -> Eigen {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return Eigen {
            values: vec![a, d],
            vectors: CMatrix::identity(2),
        };
    }
    // Eigenvector of the larger eigenvalue, from whichever row is better conditioned.
    let (u0, u1) = if half >= 0.0 {
        (C64::new(r + half, 0.0), b.conj())
    } else {
        (b, C64::new(r - half, 0.0))
    };
    let norm = (u0.norm_sqr() + u1.norm_sqr()).sqrt();
    let (u0, u1) = (u0 / norm, u1 / norm);
    let mut vectors = CMatrix::zeros(2);
    // column 0: lower eigenvalue, column 1: upper
    vectors.set(0, 0, -u1.conj());
    vectors.set(1, 0, u0.conj());
    vectors.set(0, 1, u0);
    vectors.set(1, 1, u1);
    Eigen {
        values: vec![mean - r, mean + r],
        vectors,
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi for complex Hermitian matrices. Each rotation first removes
/// the phase of `a_pq` and then applies the real symmetric Jacobi rotation.
fn jacobi(m: &CMatrix, off_tol: f64) -> Result<Eigen> {
    let n = m.dim;
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let threshold = off_tol * a.frobenius_sq().sqrt().max(1.0);
    let cap = 100 * n * n;
    let mut rotations = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if rotations >= cap {
            return Err(Error::ConvergenceFailure { rotations, off });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / g;
                let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let j_pp = C64::new(c, 0.0);
                let j_pq = C64::new(s, 0.0);
                let j_qp = -phase.conj() * s;
                let j_qq = phase.conj() * c;
                // A <- A J
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * j_pp + akq * j_qp);
                    a.set(k, q, akp * j_pq + akq * j_qq);
                }
                // A <- J^dagger A
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, j_pp.conj() * apk + j_qp.conj() * aqk);
                    a.set(q, k, j_pq.conj() * apk + j_qq.conj() * aqk);
                }
                a.set(p, q, ZERO);
                a.set(q, p, ZERO);
                a.set(p, p, C64::new(a.get(p, p).re, 0.0));
                a.set(q, q, C64::new(a.get(q, q).re, 0.0));
                // V <- V J
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * j_pp + vkq * j_qp);
                    v.set(k, q, vkp * j_pq + vkq * j_qq);
                }
                rotations += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(Eigen { values, vectors })
}

/// Finite-dimensional Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates hermiticity and stores the exact Hermitian part.
    pub fn new(matrix: CMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let deviation = matrix.hermiticity_defect();
        if deviation > tol.hermiticity {
            return Err(Error::NonHermitian {
                index: 0,
                deviation,
            });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Wraps a matrix known to be Hermitian by construction (symmetrized anyway).
    pub(crate) fn from_hermitian(matrix: CMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eigh(&self) -> Result<Eigen> {
        eigh(&self.matrix, ToleranceConfig::default().eigen_off_diagonal)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.values[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigh()?.values.last().unwrap())
    }
}

/// Unit vector in `C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, tol: &ToleranceConfig) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if amplitudes.is_empty() || (norm_sq - 1.0).abs() > tol.normalization {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Self {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "cannot normalize the zero vector");
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.amplitudes)
    }
}

/// Largest eigenvalue of `h` together with a unit eigenvector.
pub fn top_eigenpair(h: &HermitianOperator) -> Result<(f64, PureState)> {
    let e = h.eigh()?;
    let k = e.values.len() - 1;
    Ok((e.values[k], PureState::normalized(e.vector(k))))
}

/// `U H U^dagger` for a unitary `U`.
pub fn conjugate_by_unitary(
    h: &HermitianOperator,
    u: &CMatrix,
    tol: &ToleranceConfig,
) -> Result<HermitianOperator> {
    if u.dim() != h.dim() {
        return Err(Error::ShapeMismatch(format!(
            "unitary has dim {}, operator has dim {}",
            u.dim(),
            h.dim()
        )));
    }
    check_unitary(u, tol)?;
    Ok(HermitianOperator::from_hermitian(
        &(u * h.matrix()) * &u.adjoint(),
    ))
}

pub fn check_unitary(u: &CMatrix, tol: &ToleranceConfig) -> Result<()> {
    let deviation = (&u.adjoint() * u).max_abs_diff(&CMatrix::identity(u.dim()));
    if deviation > tol.unitarity {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// Positive operator-valued measure: PSD effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn effect(&self, b: usize) -> &CMatrix {
        self.effects[b].matrix()
    }

    /// Two-outcome projective measurement along the Bloch axis `axis`
    /// (outcome 0 is the `+axis` projector).
    pub fn qubit_projective(axis: [f64; 3]) -> Self {
        Self {
            dim: 2,
            effects: vec![
                HermitianOperator::from_hermitian(bloch_operator(axis, 1.0)),
                HermitianOperator::from_hermitian(bloch_operator(axis, -1.0)),
            ],
        }
    }

    /// `d_out` effects, each `I / d_out`.
    pub fn trivial(dim: usize, d_out: usize) -> Self {
        let e = HermitianOperator::from_hermitian(CMatrix::identity(dim).scale(1.0 / d_out as f64));
        Self {
            dim,
            effects: vec![e; d_out],
        }
    }

    pub(crate) fn from_effects_unchecked(effects: Vec<CMatrix>) -> Self {
        let dim = effects[0].dim();
        Self {
            dim,
            effects: effects
                .into_iter()
                .map(HermitianOperator::from_hermitian)
                .collect(),
        }
    }
}

/// Checks hermiticity, positivity and completeness, in that order.
pub fn validate_povm(effects: Vec<CMatrix>, tol: &ToleranceConfig) -> Result<Povm> {
    let dim = match effects.first() {
        Some(e) => e.dim(),
        None => return Err(Error::ShapeMismatch("POVM has no effects".into())),
    };
    for (index, e) in effects.iter().enumerate() {
        if e.dim() != dim {
            return Err(Error::NotSquare {
                index,
                expected: dim,
            });
        }
    }
    for (index, e) in effects.iter().enumerate() {
        let deviation = e.hermiticity_defect();
        if deviation > tol.hermiticity {
            return Err(Error::NonHermitian { index, deviation });
        }
    }
    let effects: Vec<HermitianOperator> = effects
        .into_iter()
        .map(HermitianOperator::from_hermitian)
        .collect();
    for (index, e) in effects.iter().enumerate() {
        let min_eigenvalue = e.min_eigenvalue()?;
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPositive {
                index,
                min_eigenvalue,
            });
        }
    }
    let mut sum = CMatrix::zeros(dim);
    for e in &effects {
        sum += e.matrix();
    }
    let deviation = sum.max_abs_diff(&CMatrix::identity(dim));
    if deviation > tol.completeness {
        return Err(Error::IncompleteSum { deviation });
    }
    Ok(Povm { dim, effects })
}

/// Ordered collection of POVMs on a common Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    dim: usize,
    povms: Vec<Povm>,
}

impl MeasurementSet {
    pub fn new(povms: Vec<Povm>) -> Result<Self> {
        let dim = match povms.first() {
            Some(p) => p.dim(),
            None => return Err(Error::ShapeMismatch("measurement set is empty".into())),
        };
        if let Some(bad) = povms.iter().position(|p| p.dim() != dim) {
            return Err(Error::ShapeMismatch(format!(
                "measurement {bad} has dim {}, expected {dim}",
                povms[bad].dim()
            )));
        }
        Ok(Self { dim, povms })
    }

    /// Validates every POVM from raw effect matrices.
    pub fn from_effects(effects: Vec<Vec<CMatrix>>, tol: &ToleranceConfig) -> Result<Self> {
        let povms = effects
            .into_iter()
            .map(|e| validate_povm(e, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::new(povms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.povms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povms.is_empty()
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn povm(&self, y: usize) -> &Povm {
        &self.povms[y]
    }

    pub fn outcome_profile(&self) -> Vec<usize> {
        self.povms.iter().map(Povm::outcomes).collect()
    }

    /// Conjugates every effect by the same unitary.
    pub fn conjugate(&self, u: &CMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let povms = self
            .povms
            .iter()
            .map(|p| {
                let effects = p
                    .effects
                    .iter()
                    .map(|e| conjugate_by_unitary(e, u, tol))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Povm {
                    dim: p.dim,
                    effects,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(povms)
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    let mut m = CMatrix::zeros(2);
    m.set(0, 1, C64::new(0.0, -1.0));
    m.set(1, 0, C64::new(0.0, 1.0));
    m
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// `(I + sign * r.sigma) / 2` for a Bloch vector `r`, in (x, y, z) order.
pub fn bloch_operator(r: [f64; 3], sign: f64) -> CMatrix {
    let mut m = CMatrix::zeros(2);
    m.set(0, 0, C64::new(0.5 * (1.0 + sign * r[2]), 0.0));
    m.set(1, 1, C64::new(0.5 * (1.0 - sign * r[2]), 0.0));
    m.set(0, 1, C64::new(0.5 * sign * r[0], -0.5 * sign * r[1]));
    m.set(1, 0, C64::new(0.5 * sign * r[0], 0.5 * sign * r[1]));
    m
}

/// Hadamard gate.
pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_real(2, &[h, h, h, -h])
}

/// Euclidean projection onto the PSD cone by clipping negative eigenvalues.
pub fn project_psd(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh(m, ToleranceConfig::default().eigen_off_diagonal)?;
    if e.values[0] >= 0.0 {
        return Ok(m.hermitian_part());
    }
    Ok(e.reconstruct(|l| l.max(0.0)))
}

/// `M^{-1/2}` for a positive definite `M`.
pub fn inverse_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh(m, ToleranceConfig::default().eigen_off_diagonal)?;
    if e.values[0] <= 0.0 {
        return Err(Error::RangeViolation(format!(
            "inverse square root of a matrix with eigenvalue {}",
            e.values[0]
        )));
    }
    Ok(e.reconstruct(|l| 1.0 / l.sqrt()))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for z in m.data.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
    }
    m
}

/// Haar-distributed unitary (Gram-Schmidt on a Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_ginibre(dim, rng);
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|j| (0..dim).map(|i| g.get(i, j)).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..dim {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = CMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u.set(i, j, *z);
        }
    }
    u
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let amps = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(amps)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    HermitianOperator::from_hermitian(random_ginibre(dim, rng))
}
