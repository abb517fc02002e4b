//! Numerics for the pseudo-parabolic Kobayashi–Warren–Carter system and its
//! optimal control.
//!
//! * [`numerics`]: grids, P1 operators, norms, banded solves, time interpolants.
//! * [`kernel`]: the length kernel `γ_ε`, nonlinearities, free energy, box projection.
//! * [`state`]: the nonlinear state stepper.
//! * [`linear`]: the linear pseudo-parabolic system, its scheme and estimates.
//! * [`control`]: cost, adjoint, gradient, projected-gradient solver, ε-continuation.
//! * [`oracles`]: brute-force references used to cross-check the above.
//! * [`experiments`]: the named check suites run by the `kwcopt` binary.
//!
//! The `guide` module renders the book chapters so their snippets run as
//! doc-tests.

// Checks are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod linear;
pub mod numerics;
pub mod oracles;
pub mod state;

pub mod cli;

#[cfg(doctest)]
pub mod guide;

pub use error::{Error, Result};
