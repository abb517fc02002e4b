//! The optimal-control layer: cost, adjoint-based gradients, the
//! projected-gradient solver and `ε`-continuation.

mod adjoint;
mod continuation;
mod cost;
mod ocp;
mod septuplets;

pub use adjoint::{apply_adjoint, check_conjugacy, gateaux_gradient, solve_adjoint, AdjointState, ConjugacyReport};
pub use continuation::{epsilon_continuation, ContinuationReport, Eps0Diagnostics, EpsLevel, DIRECTION_THRESHOLD};
pub use cost::cost;
pub use ocp::{
    optimality_residuals, solve_ocp, IterationRecord, OcpInstance, OcpOptions, OcpReport,
    OptimalityResiduals, StopReason,
};
pub use septuplets::{build_adjoint_septuplet, build_linearized_septuplet, time_reverse};
