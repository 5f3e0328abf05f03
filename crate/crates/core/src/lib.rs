//! Verification laboratory for perturbed three-dimensional exponential sums
//! and the floor sum Σ_{n≤x} Λ(⌊x/n⌋).
//!
//! Modules follow the objects being checked:
//!
//! * [`arith`] - Λ/μ sieves, pointwise Λ, ψ, deterministic summation
//! * [`vaaler`] - trigonometric approximation of ψ with its Fejér majorant
//! * [`bilinear`] - bilinear forms over function families and the
//!   generalized double large sieve checks
//! * [`expsum`] - the perturbed triple sum, literature bounds, ratio scans
//! * [`dio`] - brute-force Diophantine correlation counts
//! * [`vaughan`] - Vaughan's identity with cut D^{1/3}
//! * [`exponent`] - exact rational exponent calculus
//! * [`floor`] - S_Λ(x), the main constant and the error curve
//! * [`report`] / [`suites`] - verification reports and seeded suites

// `!(a <= b)` is used on purpose so NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bilinear;
pub mod dio;
pub mod error;
pub mod exponent;
pub mod expsum;
pub mod floor;
pub mod report;
pub mod suites;
pub mod vaaler;
pub mod vaughan;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use report::{BoundKind, VerificationReport};
