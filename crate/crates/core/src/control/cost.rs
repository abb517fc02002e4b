use crate::numerics::{traj_h_sq, DiscreteOperators, ScalarField, TimeRule, Trajectory};
use crate::state::ProblemParams;

/// Tracking-plus-effort cost
/// `(M_η/2)|η−η_ad|² + (M_θ/2)|θ−θ_ad|² + (M_u/2)|u|² + (M_v/2)|v|²`.
///
/// State terms integrate the backward interpolant (nodes `0..n_τ`), control
/// terms the forward one (nodes `1..=n_τ`, the values the scheme reads).
/// With this split the gradient assembled from the adjoint pairs exactly with
/// the control increments the scheme sees.
///
/// ```
/// use kwcopt::control::cost;
/// use kwcopt::numerics::{assemble_operators, build_grid, TimeGrid, Trajectory};
/// use kwcopt::state::ProblemParams;
/// use nalgebra::DVector;
/// let ops = assemble_operators(&build_grid(1, &[9], &[1.0]).unwrap()).unwrap();
/// let tg = TimeGrid::new(1.0, 0.1).unwrap();
/// let zero = Trajectory::zeros(tg, 9);
/// let one = Trajectory::constant(tg, DVector::from_element(9, 1.0));
/// let p = ProblemParams { m_eta: 0.0, m_theta: 0.0, m_u: 2.0, m_v: 0.0, ..ProblemParams::default() };
/// let z = DVector::zeros(9);
/// let j = cost(&ops, &p, &zero, &zero, &z, &z, &one, &zero);
/// assert!((j - 1.0).abs() < 1e-12);
/// ```
#[allow(clippy::too_many_arguments)]
pub fn cost(
    ops: &DiscreteOperators,
    params: &ProblemParams,
    eta: &Trajectory,
    theta: &Trajectory,
    eta_ad: &ScalarField,
    theta_ad: &ScalarField,
    u: &Trajectory,
    v: &Trajectory,
) -> f64 {
    let de = eta.map(|e| e - eta_ad);
    let dt = theta.map(|t| t - theta_ad);
    0.5 * params.m_eta * traj_h_sq(ops, &de, TimeRule::Backward)
        + 0.5 * params.m_theta * traj_h_sq(ops, &dt, TimeRule::Backward)
        + 0.5 * params.m_u * traj_h_sq(ops, u, TimeRule::Forward)
        + 0.5 * params.m_v * traj_h_sq(ops, v, TimeRule::Forward)
}
