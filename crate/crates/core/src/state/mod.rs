//! Nonlinear state system: parameters, instances and the time stepper.

mod params;
mod solver;

pub use params::ProblemParams;
pub(crate) use solver::nodal_gamma;
pub use solver::{
    energy_trace, solve_state, step_state, StateInstance, StateTrajectory, StepDiagnostics,
    NEWTON_FLOOR, NEWTON_MAX_HALVINGS, NEWTON_MAX_ITER, NEWTON_TOL,
};
