//! Numerics for perturbed ψ-Fueter operators and the Cimmino-type systems
//! they generate.
//!
//! The crate evaluates perturbed ψ-Fueter operators, the perturbed Cauchy
//! kernel and its boundary integrals, Moebius covariance coefficients and
//! finite-dimensional weighted Bergman kernels, and checks the associated
//! integral identities with deterministic quadrature.

pub mod bergman;
pub mod cauchy;
pub mod errata;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod kernels;
pub mod moebius;
pub mod numeric;
pub mod operators;
pub mod quat;
pub mod report;
pub mod runner;
pub mod sampling;

pub use error::{Error, Result};
pub use quat::{Quaternion, StructuralSet};
