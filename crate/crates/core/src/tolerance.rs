//! Numerical tolerances shared by every constructor and solver.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Max absolute entry deviation of `H` from `H^dagger`.
    pub hermiticity: f64,
    /// Smallest eigenvalue accepted for a positive semidefinite operator.
    pub psd: f64,
    /// Max absolute entry deviation of a POVM sum from the identity.
    pub completeness: f64,
    /// Allowed deviation of a pure state's squared norm from one.
    pub normalization: f64,
    /// Max entry deviation of `U^dagger U` from the identity.
    pub unitarity: f64,
    /// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this.
    pub eigen_off_diagonal: f64,
    /// Witness margin above which a quantum value counts as a violation.
    pub decision: f64,
    /// Residual at which a parent POVM search is declared feasible.
    pub feasibility: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            psd: 1e-9,
            completeness: 1e-10,
            normalization: 1e-12,
            unitarity: 1e-10,
            eigen_off_diagonal: 1e-13,
            decision: 1e-9,
            feasibility: 1e-7,
        }
    }
}
