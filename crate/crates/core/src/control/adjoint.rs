use serde::Serialize;

use super::septuplets::{build_adjoint_septuplet, build_linearized_septuplet, time_reverse};
use crate::error::Result;
use crate::linear::{solve_linear, LinearProblem, LinearSolution, Septuplet};
use crate::numerics::{time_sum, DiscreteOperators, ScalarField, TimeRule, Trajectory};
use crate::state::{ProblemParams, StateInstance, StateTrajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointState {
    pub p: Trajectory,
    pub z: Trajectory,
    /// `|p*(T)|_H` and `|z*(T)|_H`; zero by construction.
    pub terminal: (f64, f64),
}

/// `𝒫* = 𝒯 ∘ 𝒫 ∘ 𝒯`: reverse the forcings, solve with the (already
/// reversed) adjoint septuplet from zero data, reverse the result.
pub fn apply_adjoint(
    adjoint: &Septuplet,
    f_p: &Trajectory,
    f_z: &Trajectory,
    params: &ProblemParams,
    ops: &DiscreteOperators,
) -> Result<LinearSolution> {
    let n = ops.nodes();
    let prob = LinearProblem {
        sep: adjoint.clone(),
        p0: ScalarField::zeros(n),
        z0: ScalarField::zeros(n),
        h: time_reverse(f_p),
        k: time_reverse(f_z),
    };
    let sol = solve_linear(&prob, params, ops)?;
    Ok(LinearSolution {
        p: time_reverse(&sol.p),
        z: time_reverse(&sol.z),
    })
}

/// The adjoint state of the cost at `state`, driven by
/// `M_η(η − η_ad)` and `M_θ(θ − θ_ad)`.
pub fn solve_adjoint(inst: &StateInstance, state: &StateTrajectory) -> Result<AdjointState> {
    let p = &inst.params;
    let sep = build_adjoint_septuplet(state, p, &inst.bundle, &inst.ops)?;
    let fp = state.eta.map(|e| (e - &inst.eta_ad) * p.m_eta);
    let fz = state.theta.map(|t| (t - &inst.theta_ad) * p.m_theta);
    let sol = apply_adjoint(&sep, &fp, &fz, p, &inst.ops)?;
    let terminal = (inst.ops.norm_h(sol.p.last()), inst.ops.norm_h(sol.z.last()));
    Ok(AdjointState {
        p: sol.p,
        z: sol.z,
        terminal,
    })
}

/// `[L_u p* + M_u u, L_v z* + M_v v]`.
pub fn gateaux_gradient(
    u: &Trajectory,
    v: &Trajectory,
    adj: &AdjointState,
    params: &ProblemParams,
) -> (Trajectory, Trajectory) {
    (
        adj.p.scaled(params.l_u).axpy(params.m_u, u),
        adj.z.scaled(params.l_v).axpy(params.m_v, v),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugacyReport {
    /// `(𝒫*(u,v), [h,k])`, forward rule.
    pub adjoint_side: f64,
    /// `([u,v], 𝒫̄(h,k))`, backward rule.
    pub linear_side: f64,
    pub gap: f64,
    /// `|𝒫*(u,v)|·|[h,k]|`, the Cauchy–Schwarz size of the adjoint side.
    pub scale: f64,
}

fn pair(ops: &DiscreteOperators, a: (&Trajectory, &Trajectory), b: (&Trajectory, &Trajectory), rule: TimeRule) -> f64 {
    time_sum(a.0.len(), a.0.time(), rule, |i| ops.inner_h(&a.0[i], &b.0[i]) + ops.inner_h(&a.1[i], &b.1[i]))
}

/// Compares the two sides of the duality between the adjoint solve and the
/// linearized solve at `state`.
pub fn check_conjugacy(
    inst: &StateInstance,
    state: &StateTrajectory,
    uv: (&Trajectory, &Trajectory),
    hk: (&Trajectory, &Trajectory),
) -> Result<ConjugacyReport> {
    let (ops, p) = (&*inst.ops, &inst.params);
    let adj_sep = build_adjoint_septuplet(state, p, &inst.bundle, ops)?;
    let star = apply_adjoint(&adj_sep, uv.0, uv.1, p, ops)?;
    let n = ops.nodes();
    let lin = solve_linear(
        &LinearProblem {
            sep: build_linearized_septuplet(state, p, &inst.bundle, ops)?,
            p0: ScalarField::zeros(n),
            z0: ScalarField::zeros(n),
            h: hk.0.clone(),
            k: hk.1.clone(),
        },
        p,
        ops,
    )?;
    let adjoint_side = pair(ops, (&star.p, &star.z), hk, TimeRule::Forward);
    let linear_side = pair(ops, uv, (&lin.p, &lin.z), TimeRule::Backward);
    let scale = (pair(ops, (&star.p, &star.z), (&star.p, &star.z), TimeRule::Forward)
        * pair(ops, hk, hk, TimeRule::Forward))
    .sqrt();
    Ok(ConjugacyReport {
        adjoint_side,
        linear_side,
        gap: (adjoint_side - linear_side).abs(),
        scale,
    })
}
