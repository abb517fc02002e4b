//! The linear pseudo-parabolic system driven by a coefficient septuplet:
//! its time scheme, the forcing map that inverts it, and the a-priori
//! estimates the scheme satisfies.

mod septuplet;
mod stability;
mod step;

pub use septuplet::{tau1, tau2, validate_septuplet, Septuplet, SeptupletData, SeptupletNorms};
pub use stability::{
    gronwall_diagnostic, input_norm, solution_bounds, solution_norm, stability_check, Estimate,
    GronwallReport, StabilityReport, ESTIMATE_SLACK, GRONWALL_SLACK,
};
pub use step::{average_forcing, residual_forcing, solve_linear, step_linear, LinearProblem, LinearSolution};
