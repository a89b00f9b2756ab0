//! Asymptotic analysis of divide-and-conquer recurrences
//!
//! ```text
//! T(x) = sum_i a_i T(x / b_i + h_i(x)) + g(x)
//! ```
//!
//! The tight bound is `Theta(x^p (1 + int_{x0}^x t^-p g(t) dt/t))` where `p`
//! solves `sum_i a_i b_i^-p = 1`. This crate computes `p`, classifies the
//! bound symbolically for poly-log `g`, evaluates it numerically, decides
//! which perturbations `h_i` preserve it, and checks all of this against
//! direct evaluation of the recurrence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod error;
pub mod exponent;
pub mod model;
pub mod or_variation;
pub mod perturbation;
pub mod quadrature;
pub mod simulator;

pub use bound::{classify_master_theorem, classify_theta, phi_numeric, GrowthClass, MasterCase, MasterCaseKind};
pub use error::{Error, Result};
pub use exponent::{solve_p, Exponent};
pub use model::{
    parse_spec, validate, AtomicMeasure, BaseCase, DrivingFunction, Envelope, Perturbation, PerturbationSpec, PolyLog,
    RecurrenceSpec, Side, Violation, ViolationCode,
};
pub use or_variation::{OrCheck, OrWitness};
pub use perturbation::{check_admissibility, Admissibility, AdmissibilityVerdict};
pub use simulator::{EvaluationGrid, RatioBand};
