//! Coefficients of the linearized system and of its adjoint, read off a
//! computed state trajectory.

use crate::error::Result;
use crate::kernel::{grad2, hess2, NonlinearityBundle};
use crate::linear::{validate_septuplet, Septuplet, SeptupletData};
use crate::numerics::{DiscreteOperators, ScalarField, Trajectory};
use crate::state::{nodal_gamma, ProblemParams, StateTrajectory};

/// `𝒯`: `w̃_i = w_{n_τ−i}`.
///
/// ```
/// use kwcopt::control::time_reverse;
/// use kwcopt::numerics::{TimeGrid, Trajectory};
/// use nalgebra::DVector;
/// let tg = TimeGrid::new(1.0, 0.5).unwrap();
/// let w = Trajectory::from_fn(tg, |i| DVector::from_element(1, i as f64));
/// assert_eq!(time_reverse(&w)[0][0], 2.0);
/// assert_eq!(time_reverse(&time_reverse(&w)), w);
/// ```
pub fn time_reverse<F: Clone>(w: &Trajectory<F>) -> Trajectory<F> {
    w.reversed()
}

/// Backward difference at `t_i`, forward difference at `t_0`.
fn time_derivative(w: &Trajectory, i: usize) -> ScalarField {
    let tau = w.time().tau();
    if i == 0 {
        (&w[1] - &w[0]) / tau
    } else {
        (&w[i] - &w[i - 1]) / tau
    }
}

/// The forward-time coefficients shared by both builders; `b, c, ξ` are
/// filled by the callers.
fn common(
    state: &StateTrajectory,
    params: &ProblemParams,
    bundle: &NonlinearityBundle,
    ops: &DiscreteOperators,
) -> SeptupletData {
    let tg = *state.eta.time();
    let dim = ops.grid().dim();
    let eps = params.eps;
    let a = state.eta.map(|e| e.map(|x| bundle.alpha0(x)));
    let lambda = Trajectory::from_fn(tg, |i| {
        let gam = nodal_gamma(ops, eps, &state.theta[i]);
        let e = &state.eta[i];
        ScalarField::from_fn(e.len(), |j, _| bundle.dg(e[j]) + bundle.ddalpha(e[j]) * gam[j])
    });
    let omega = Trajectory::from_fn(tg, |i| {
        let da = ops.element_mean(&state.eta[i].map(|x| bundle.dalpha(x)));
        ops.gradient(&state.theta[i])
            .iter()
            .zip(da)
            .map(|(y, m)| grad2(eps, y) * m)
            .collect()
    });
    let big_a = Trajectory::from_fn(tg, |i| {
        let al = ops.element_mean(&state.eta[i].map(|x| bundle.alpha(x)));
        ops.gradient(&state.theta[i])
            .iter()
            .zip(al)
            .map(|(y, m)| hess2(eps, y, dim) * m)
            .collect()
    });
    let n = ops.nodes();
    SeptupletData {
        a,
        b: Trajectory::zeros(tg, n),
        c: Trajectory::zeros(tg, n),
        lambda,
        xi: Trajectory::zeros(tg, n),
        omega,
        big_a,
        delta_a: bundle.delta_star(),
    }
}

/// `a = α₀(η)`, `b = 0`, `c = α₀′(η)∂_tθ`, `λ = g′(η) + α″(η)γ_ε(∇θ)`,
/// `ξ = 0`, `ω = α′(η)∇γ_ε(∇θ)`, `A = α(η)∇²γ_ε(∇θ)`.
///
/// `γ_ε(∇θ)` in `λ` is the lumped nodal average used by the state scheme;
/// `α′, α` in `ω, A` are element vertex means.
pub fn build_linearized_septuplet(
    state: &StateTrajectory,
    params: &ProblemParams,
    bundle: &NonlinearityBundle,
    ops: &DiscreteOperators,
) -> Result<Septuplet> {
    let mut data = common(state, params, bundle, ops);
    let tg = *state.eta.time();
    data.c = Trajectory::from_fn(tg, |i| {
        let dt = time_derivative(&state.theta, i);
        ScalarField::from_fn(dt.len(), |j, _| bundle.dalpha0(state.eta[i][j]) * dt[j])
    });
    validate_septuplet(data, ops)
}

/// The adjoint coefficients, already time-reversed:
/// `𝒯[α₀(η)]`, `𝒯[−α₀′(η)∂_tη]`, `0`, `𝒯[λ]`, `𝒯[α₀′(η)∂_tθ]`, `𝒯[ω]`, `𝒯[A]`.
pub fn build_adjoint_septuplet(
    state: &StateTrajectory,
    params: &ProblemParams,
    bundle: &NonlinearityBundle,
    ops: &DiscreteOperators,
) -> Result<Septuplet> {
    let mut data = common(state, params, bundle, ops);
    let tg = *state.eta.time();
    let da0 = |i: usize, j: usize| bundle.dalpha0(state.eta[i][j]);
    data.b = Trajectory::from_fn(tg, |i| {
        let dt = time_derivative(&state.eta, i);
        ScalarField::from_fn(dt.len(), |j, _| -da0(i, j) * dt[j])
    });
    data.xi = Trajectory::from_fn(tg, |i| {
        let dt = time_derivative(&state.theta, i);
        ScalarField::from_fn(dt.len(), |j, _| da0(i, j) * dt[j])
    });
    validate_septuplet(data.reversed(), ops)
}
