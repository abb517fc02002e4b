//! Problem instances shared by the acceptance suite, the tests and the CLI.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;

use crate::control::OcpInstance;
use crate::error::Result;
use crate::kernel::{BoxConstraint, NonlinearityBundle};
use crate::numerics::{assemble_operators, build_grid, TimeGrid, Trajectory};
use crate::state::{solve_state, ProblemParams, StateInstance};

/// `η₀ = 0.5 + 0.25 sin(2πx)`.
pub fn reference_eta0(x: f64) -> f64 {
    0.5 + 0.25 * (2.0 * PI * x).sin()
}

/// `θ₀ = x(1 − x)`.
pub fn reference_theta0(x: f64) -> f64 {
    x * (1.0 - x)
}

/// Builds a 1D instance on `(0, 1)` with zero controls and targets equal to
/// the uncontrolled endpoint fields.
pub fn uncontrolled_target_instance(
    nodes: usize,
    tau: f64,
    params: ProblemParams,
    eta0: impl Fn(f64) -> f64,
    theta0: impl Fn(f64) -> f64,
) -> Result<OcpInstance> {
    let grid = build_grid(1, &[nodes], &[1.0])?;
    let ops = Arc::new(assemble_operators(&grid)?);
    let time = TimeGrid::new(params.horizon, tau)?;
    let n = ops.nodes();
    let mut state = StateInstance {
        ops: ops.clone(),
        time,
        params,
        bundle: NonlinearityBundle::default_with(1.0),
        eta0: grid.sample(|x| eta0(x[0])),
        theta0: grid.sample(|x| theta0(x[0])),
        eta_ad: DVector::zeros(n),
        theta_ad: DVector::zeros(n),
        u: Trajectory::zeros(time, n),
        v: Trajectory::zeros(time, n),
    };
    let free = solve_state(&state)?;
    state.eta_ad = free.eta.last().clone();
    state.theta_ad = free.theta.last().clone();
    Ok(OcpInstance {
        state,
        constraint: BoxConstraint::constant(time, n, -1.0, 1.0)?,
    })
}

/// The reference instance: default bundle with `δ_* = 1`, `μ = ν = 1`,
/// `ε = 0.5`, unit weights, `T = 1`, box `[−1, 1]`.
pub fn reference_instance(nodes: usize, tau: f64) -> Result<OcpInstance> {
    uncontrolled_target_instance(nodes, tau, ProblemParams::default(), reference_eta0, reference_theta0)
}
