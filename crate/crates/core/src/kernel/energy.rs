//! Discrete free energy `½∫|∇η|² + ∫G(η) + ∫α(η)γ_ε(∇θ)`.

use super::bundle::NonlinearityBundle;
use super::gamma::gamma2;
use crate::numerics::{DiscreteOperators, ScalarField};

/// Evaluates the free energy with the quadrature the state solver uses:
/// exact gradients per element, `∫G(η)` by vertex lumping, and `α(η)` as the
/// vertex mean of `α(η_j)` on each element. With these choices each
/// sub-step of the state scheme is an exact minimizing movement of this
/// functional, which is what makes the discrete energy decrease.
///
/// ```
/// use kwcopt::kernel::{kwc_energy, NonlinearityBundle};
/// use kwcopt::numerics::{assemble_operators, build_grid};
/// use nalgebra::DVector;
/// let ops = assemble_operators(&build_grid(1, &[9], &[1.0]).unwrap()).unwrap();
/// let bundle = NonlinearityBundle::default_with(1.0);
/// let eta = DVector::from_element(9, 1.0);
/// let theta = DVector::from_element(9, 0.3);
/// assert!((kwc_energy(&ops, 0.5, &bundle, &eta, &theta) - 1.0).abs() < 1e-14);
/// assert_eq!(kwc_energy(&ops, 0.0, &bundle, &eta, &theta), 0.0);
/// ```
pub fn kwc_energy(
    ops: &DiscreteOperators,
    eps: f64,
    bundle: &NonlinearityBundle,
    eta: &ScalarField,
    theta: &ScalarField,
) -> f64 {
    let dirichlet = 0.5 * ops.grad_sq(eta);
    let potential: f64 = ops
        .lumped()
        .iter()
        .zip(eta.iter())
        .map(|(m, &e)| m * bundle.G(e))
        .sum();
    let alpha = eta.map(|e| bundle.alpha(e));
    let abar = ops.element_mean(&alpha);
    let grad = ops.gradient(theta);
    let length: f64 = ops
        .grid()
        .elements()
        .iter()
        .zip(abar.iter().zip(&grad))
        .map(|(el, (a, y))| el.measure * a * gamma2(eps, y))
        .sum();
    dirichlet + potential + length
}
