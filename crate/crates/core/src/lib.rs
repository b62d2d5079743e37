//! Stabilized P1 finite elements for the periodic viscous/inviscid Burgers
//! equation on the unit interval.
//!
//! The crate provides the semidiscrete scheme with linear and nonlinear
//! (shock-capturing) artificial viscosity, SSP-RK2 time stepping with CFL
//! control, a Helmholtz differential filter with its associated norms,
//! exact reference solutions (characteristics before shock formation,
//! front tracking after), error norms and convergence rates, an a
//! posteriori error estimator, and monotonicity invariant checks.

pub mod analysis;
pub mod assembly;
pub mod cases;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod filter;
pub mod mesh;
pub mod solver;
pub mod tridiag;
pub mod viscosity;

pub use error::{Error, Result};
pub use mesh::{ElementField, Mesh, NodalField};
