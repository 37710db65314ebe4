//! Witnessing measurement incompatibility with generalized random access codes.
//!
//! The crate computes, for a prepare-and-measure random access code (RAC)
//! with `n` inputs of sizes `d_1..d_n` and a `d`-dimensional message:
//!
//! * the classical value `S_c`, which bounds every strategy that uses
//!   compatible (jointly measurable) measurements, by exhaustive search
//!   ([`scenario::brute_force_sc`]) or in closed form ([`bounds::exact_sc`]);
//! * a general upper bound on `S_c` ([`bounds::upper_bound_sc`]);
//! * the quantum value of a concrete set of measurements
//!   ([`quantum::quantum_value`]).
//!
//! A quantum value above `S_c` certifies that the measurements are
//! incompatible ([`report::assemble_witness_report`]). The
//! [`triple`] module maps out which triples of projective qubit measurements
//! the three-input binary RAC detects, and [`compat`] searches directly for a
//! parent POVM.

pub mod bounds;
pub mod compat;
pub mod error;
pub mod io;
pub mod lp;
pub mod neldermead;
pub mod operator;
pub mod quantum;
pub mod report;
pub mod scenario;
pub mod seesaw;
pub mod tolerance;
pub mod triple;

pub use error::{Error, Result};
pub use operator::{
    conjugate_by_unitary, top_eigenpair, validate_povm, CMatrix, HermitianOperator,
    MeasurementSet, Povm, PureState, C64,
};
pub use scenario::{Objective, Scenario};
pub use tolerance::ToleranceConfig;

/// Exact rational numbers used for classical bounds.
pub type Rational = num_rational::Ratio<i64>;
