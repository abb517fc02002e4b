//! Decoupled semi-implicit stepping for the nonlinear state system.
//!
//! Each step first advances `η` by backward Euler with `θ` frozen at the
//! previous level, then advances `θ` by minimizing a strictly convex
//! functional. Both sub-steps are damped Newton iterations whose Jacobians
//! are exactly the derivatives of the discrete residuals below.

use std::sync::Arc;

use nalgebra::{DVector, Vector2};

use super::params::ProblemParams;
use crate::error::{Error, Result};
use crate::kernel::{gamma2, grad2, hess2, kwc_energy, NonlinearityBundle};
use crate::numerics::{BandedLu, CsrMatrix, DiscreteOperators, ScalarField, TimeGrid, Trajectory};

/// Residual tolerance `|r|_{V*}` of both Newton solves.
pub const NEWTON_TOL: f64 = 1e-10;
/// Iteration cap of both Newton solves.
pub const NEWTON_MAX_ITER: usize = 50;
/// Step halvings tried before a Newton solve is declared stuck.
pub const NEWTON_MAX_HALVINGS: usize = 30;
/// A Newton solve that can no longer reduce its residual is accepted when the
/// residual is below this floor; on fine grids rounding alone sits above
/// [`NEWTON_TOL`].
pub const NEWTON_FLOOR: f64 = 1e-8;

/// Everything needed to run the state system forward.
#[derive(Debug, Clone)]
pub struct StateInstance {
    pub ops: Arc<DiscreteOperators>,
    pub time: TimeGrid,
    pub params: ProblemParams,
    pub bundle: NonlinearityBundle,
    pub eta0: ScalarField,
    pub theta0: ScalarField,
    pub eta_ad: ScalarField,
    pub theta_ad: ScalarField,
    pub u: Trajectory,
    pub v: Trajectory,
}

impl StateInstance {
    /// Checks layouts, finiteness of the initial data and the parameters.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let n = self.ops.nodes();
        for (name, f) in [
            ("eta0", &self.eta0),
            ("theta0", &self.theta0),
            ("eta_ad", &self.eta_ad),
            ("theta_ad", &self.theta_ad),
        ] {
            if f.len() != n {
                return Err(Error::Input(format!("{name} has {} values for {n} nodes", f.len())));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input(format!("{name} is not finite")));
            }
        }
        for (name, c) in [("u", &self.u), ("v", &self.v)] {
            if c.time() != &self.time || c[0].len() != n {
                return Err(Error::Input(format!("control {name} does not match the grids")));
            }
        }
        Ok(())
    }

    /// Copy with different controls.
    pub fn with_controls(&self, u: Trajectory, v: Trajectory) -> Self {
        StateInstance {
            u,
            v,
            ..self.clone()
        }
    }
}

/// Newton statistics of one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub eta_iterations: usize,
    pub eta_residual: f64,
    pub theta_iterations: usize,
    pub theta_residual: f64,
}

#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub eta: Trajectory,
    pub theta: Trajectory,
    /// Entry `i − 1` belongs to step `i`.
    pub steps: Vec<StepDiagnostics>,
    pub energy: Vec<f64>,
}

/// Advances `[η_{i−1}, θ_{i−1}]` by one step with controls `u_i, v_i`.
///
/// `step` is only used to label errors.
#[allow(clippy::too_many_arguments)]
pub fn step_state(
    eta_prev: &ScalarField,
    theta_prev: &ScalarField,
    u_i: &ScalarField,
    v_i: &ScalarField,
    params: &ProblemParams,
    bundle: &NonlinearityBundle,
    ops: &DiscreteOperators,
    tau: f64,
    step: usize,
) -> Result<(ScalarField, ScalarField, StepDiagnostics)> {
    if !(params.eps > 0.0) {
        return Err(Error::ZeroEpsilon("step_state"));
    }
    if !(tau > 0.0) {
        return Err(Error::Input(format!("step τ = {tau} must be positive")));
    }
    let (eta, eta_it, eta_res) = eta_step(eta_prev, theta_prev, u_i, params, bundle, ops, tau, step)?;
    let (theta, th_it, th_res) = theta_step(&eta, theta_prev, v_i, params, bundle, ops, tau, step)?;
    Ok((
        eta,
        theta,
        StepDiagnostics {
            eta_iterations: eta_it,
            eta_residual: eta_res,
            theta_iterations: th_it,
            theta_residual: th_res,
        },
    ))
}

/// Nodal lumped average of `γ_ε(∇θ)`.
pub(crate) fn nodal_gamma(ops: &DiscreteOperators, eps: f64, theta: &ScalarField) -> ScalarField {
    let g: Vec<f64> = ops.gradient(theta).iter().map(|y| gamma2(eps, y)).collect();
    ops.nodal_average(&g)
}

#[allow(clippy::too_many_arguments)]
fn eta_step(
    eta_prev: &ScalarField,
    theta_prev: &ScalarField,
    u_i: &ScalarField,
    p: &ProblemParams,
    bundle: &NonlinearityBundle,
    ops: &DiscreteOperators,
    tau: f64,
    step: usize,
) -> Result<(ScalarField, usize, f64)> {
    let m = ops.lumped();
    let gam = nodal_gamma(ops, p.eps, theta_prev);
    let pseudo = CsrMatrix::lincomb(&[(1.0 / tau, ops.mass()), (p.mu * p.mu / tau, ops.stiffness())]);
    let linear = CsrMatrix::lincomb(&[(1.0, &pseudo), (1.0, ops.stiffness())]);
    let rhs = pseudo.mul_vec(eta_prev) + ops.mass().mul_vec(u_i) * p.l_u;
    let residual = |eta: &ScalarField| -> DVector<f64> {
        let nl = DVector::from_fn(eta.len(), |j, _| {
            m[j] * (bundle.g(eta[j]) + bundle.dalpha(eta[j]) * gam[j])
        });
        linear.mul_vec(eta) + nl - &rhs
    };
    let jacobian = |eta: &ScalarField| -> CsrMatrix {
        let d = DVector::from_fn(eta.len(), |j, _| {
            m[j] * (bundle.dg(eta[j]) + bundle.ddalpha(eta[j]) * gam[j])
        });
        CsrMatrix::lincomb(&[(1.0, &linear), (1.0, &CsrMatrix::diagonal(&d))])
    };
    newton(ops, eta_prev.clone(), residual, jacobian, step, "eta")
}

#[allow(clippy::too_many_arguments)]
fn theta_step(
    eta: &ScalarField,
    theta_prev: &ScalarField,
    v_i: &ScalarField,
    p: &ProblemParams,
    bundle: &NonlinearityBundle,
    ops: &DiscreteOperators,
    tau: f64,
    step: usize,
) -> Result<(ScalarField, usize, f64)> {
    let grid = ops.grid();
    let dim = grid.dim();
    let a = eta.map(|e| bundle.alpha0(e));
    let abar = ops.element_mean(&eta.map(|e| bundle.alpha(e)));
    let metric = CsrMatrix::lincomb(&[
        (1.0 / tau, &ops.lumped_mass(&a)),
        (p.nu * p.nu / tau, ops.stiffness()),
    ]);
    let load = ops.mass().mul_vec(v_i) * p.l_v;
    let eps = p.eps;
    let residual = |theta: &ScalarField| -> DVector<f64> {
        let mut r = metric.mul_vec(&(theta - theta_prev)) - &load;
        let grads = ops.gradient(theta);
        for ((el, y), ab) in grid.elements().iter().zip(&grads).zip(&abar) {
            let w = grad2(eps, y) * (el.measure * ab);
            for (k, &j) in el.vertices(dim).iter().enumerate() {
                r[j] += w.dot(&Vector2::from(el.grads[k]));
            }
        }
        r
    };
    let jacobian = |theta: &ScalarField| -> CsrMatrix {
        let grads = ops.gradient(theta);
        let amat: Vec<_> = grads
            .iter()
            .zip(&abar)
            .map(|(y, ab)| hess2(eps, y, dim) * *ab)
            .collect();
        CsrMatrix::lincomb(&[(1.0, &metric), (1.0, &ops.weighted_stiffness(&amat))])
    };
    newton(ops, theta_prev.clone(), residual, jacobian, step, "theta")
}

/// Damped Newton on `r(x) = 0` with merit `|r|_{V*}`.
fn newton(
    ops: &DiscreteOperators,
    mut x: ScalarField,
    residual: impl Fn(&ScalarField) -> DVector<f64>,
    jacobian: impl Fn(&ScalarField) -> CsrMatrix,
    step: usize,
    stage: &'static str,
) -> Result<(ScalarField, usize, f64)> {
    let mut r = residual(&x);
    let mut norm = ops.dual_norm_sq(&r).sqrt();
    for it in 0..NEWTON_MAX_ITER {
        if norm <= NEWTON_TOL {
            return Ok((x, it, norm));
        }
        let dx = BandedLu::factor(&jacobian(&x))?.solve(&(-&r));
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial = &x + &dx * s;
            let rt = residual(&trial);
            let nt = ops.dual_norm_sq(&rt).sqrt();
            if nt < norm {
                x = trial;
                r = rt;
                norm = nt;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            if norm <= NEWTON_FLOOR {
                return Ok((x, it + 1, norm));
            }
            return Err(Error::Newton {
                step,
                stage,
                residual: norm,
                iterations: it,
            });
        }
    }
    if norm <= NEWTON_TOL {
        Ok((x, NEWTON_MAX_ITER, norm))
    } else {
        Err(Error::Newton {
            step,
            stage,
            residual: norm,
            iterations: NEWTON_MAX_ITER,
        })
    }
}

/// Marches [`step_state`] over the whole time grid.
pub fn solve_state(inst: &StateInstance) -> Result<StateTrajectory> {
    inst.validate()?;
    if !(inst.params.eps > 0.0) {
        return Err(Error::ZeroEpsilon("solve_state"));
    }
    let tg = inst.time;
    let n = tg.steps();
    let mut eta = Vec::with_capacity(n + 1);
    let mut theta = Vec::with_capacity(n + 1);
    let mut steps = Vec::with_capacity(n);
    eta.push(inst.eta0.clone());
    theta.push(inst.theta0.clone());
    for i in 1..=n {
        let (e, t, d) = step_state(
            &eta[i - 1],
            &theta[i - 1],
            &inst.u[i],
            &inst.v[i],
            &inst.params,
            &inst.bundle,
            &inst.ops,
            tg.tau(),
            i,
        )?;
        eta.push(e);
        theta.push(t);
        steps.push(d);
    }
    let eta = Trajectory::new(tg, eta)?;
    let theta = Trajectory::new(tg, theta)?;
    let energy = energy_trace(&inst.ops, &eta, &theta, &inst.params, &inst.bundle);
    Ok(StateTrajectory {
        eta,
        theta,
        steps,
        energy,
    })
}

/// `F_ε(η(t_i), θ(t_i))` for every node.
pub fn energy_trace(
    ops: &DiscreteOperators,
    eta: &Trajectory,
    theta: &Trajectory,
    params: &ProblemParams,
    bundle: &NonlinearityBundle,
) -> Vec<f64> {
    eta.frames()
        .iter()
        .zip(theta.frames())
        .map(|(e, t)| kwc_energy(ops, params.eps, bundle, e, t))
        .collect()
}
