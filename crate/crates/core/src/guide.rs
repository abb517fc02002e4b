//! Book chapters compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/discretization.md")]
pub mod discretization {}
#[doc = include_str!("../../../book/src/kernel.md")]
pub mod kernel {}
#[doc = include_str!("../../../book/src/state.md")]
pub mod state {}
#[doc = include_str!("../../../book/src/linear.md")]
pub mod linear {}
#[doc = include_str!("../../../book/src/adjoint.md")]
pub mod adjoint {}
#[doc = include_str!("../../../book/src/control.md")]
pub mod control {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/checks.md")]
pub mod checks {}
