//! Projected-gradient solver with Barzilai-Borwein trial steps, Armijo
//! backtracking, and the first-order optimality residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adjoint::{gateaux_gradient, solve_adjoint, AdjointState};
use super::cost::cost;
use crate::error::{Error, Result};
use crate::kernel::{project_box, BoxConstraint};
use crate::numerics::{time_sum, traj_h_sq, DiscreteOperators, TimeRule, Trajectory};
use crate::state::{solve_state, ProblemParams, StateInstance, StateTrajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OcpOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub max_halvings: usize,
    pub vi_samples: usize,
    pub seed: u64,
}

impl Default for OcpOptions {
    fn default() -> Self {
        OcpOptions {
            tol: 1e-6,
            max_iter: 500,
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
            max_halvings: 40,
            vi_samples: 100,
            seed: 20240601,
        }
    }
}

/// A state instance together with the admissible box for `u`.
#[derive(Debug, Clone)]
pub struct OcpInstance {
    pub state: StateInstance,
    pub constraint: BoxConstraint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityResiduals {
    /// `|u − proj_𝒦(−(L_u/M_u)p*)|_𝓗`, zero when `M_u = 0`.
    pub fixed_point: f64,
    /// `|L_v z* + M_v v|_𝓗`.
    pub linear: f64,
    /// Smallest sampled `(L_u p* + M_u u, h − u)_𝓗` over `h ∈ 𝒦`.
    pub vi_slack: f64,
}

impl OptimalityResiduals {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.fixed_point <= tol && self.linear <= tol && self.vi_slack >= -tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub cost: f64,
    /// `|u − proj_𝒦(u − g_u)|_𝓗 + |g_v|_𝓗` at the iterate.
    pub residual: f64,
    /// Accepted step, zero on the last record.
    pub step: f64,
    pub halvings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StopReason {
    Converged,
    MaxIterations,
    LineSearch { halvings: usize, gradient_norm: f64 },
}

#[derive(Debug, Clone)]
pub struct OcpReport {
    pub u: Trajectory,
    pub v: Trajectory,
    pub state: StateTrajectory,
    pub adjoint: AdjointState,
    pub history: Vec<IterationRecord>,
    pub residuals: OptimalityResiduals,
    pub stop: StopReason,
}

impl OcpReport {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    pub fn cost(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |r| r.cost)
    }

    /// The stop reason as an error, if the solve did not converge.
    pub fn error(&self) -> Option<Error> {
        match self.stop {
            StopReason::Converged | StopReason::MaxIterations => None,
            StopReason::LineSearch { halvings, gradient_norm } => Some(Error::LineSearch {
                iteration: self.history.len().saturating_sub(1),
                halvings,
                gradient_norm,
            }),
        }
    }
}

fn h_norm(ops: &DiscreteOperators, w: &Trajectory) -> f64 {
    traj_h_sq(ops, w, TimeRule::Forward).sqrt()
}

fn inner(ops: &DiscreteOperators, a: &Trajectory, b: &Trajectory) -> f64 {
    time_sum(a.len(), a.time(), TimeRule::Forward, |i| ops.inner_h(&a[i], &b[i]))
}

/// Barzilai-Borwein step `⟨d,d⟩/⟨d,y⟩` from the last control change `d` and
/// gradient change `y`, clamped to `[1e-6, 1e6]`. `None` when the curvature
/// estimate is not positive.
fn bb_step(ops: &DiscreteOperators, d: [&Trajectory; 2], y: [&Trajectory; 2]) -> Option<f64> {
    let dd = inner(ops, d[0], d[0]) + inner(ops, d[1], d[1]);
    let dy = inner(ops, d[0], y[0]) + inner(ops, d[1], y[1]);
    let s = dd / dy;
    (dy > 0.0 && s.is_finite()).then(|| s.clamp(1e-6, 1e6))
}

fn evaluate(inst: &StateInstance, u: &Trajectory, v: &Trajectory) -> Result<(StateTrajectory, f64)> {
    let st = solve_state(&inst.with_controls(u.clone(), v.clone()))?;
    let j = cost(&inst.ops, &inst.params, &st.eta, &st.theta, &inst.eta_ad, &inst.theta_ad, u, v);
    Ok((st, j))
}

/// Residuals of the first-order system at `(u, v)` with adjoint `adj`.
#[allow(clippy::too_many_arguments)]
pub fn optimality_residuals(
    u: &Trajectory,
    v: &Trajectory,
    adj: &AdjointState,
    params: &ProblemParams,
    constraint: &BoxConstraint,
    ops: &DiscreteOperators,
    samples: usize,
    seed: u64,
) -> Result<OptimalityResiduals> {
    let fixed_point = if params.m_u > 0.0 {
        let target = project_box(constraint, &adj.p.scaled(-params.l_u / params.m_u))?;
        h_norm(ops, &u.axpy(-1.0, &target))
    } else {
        0.0
    };
    let linear = h_norm(ops, &adj.z.scaled(params.l_v).axpy(params.m_v, v));
    let (gu, _) = gateaux_gradient(u, v, adj, params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (constraint.lower(), constraint.upper());
    let mut vi_slack = f64::INFINITY;
    for _ in 0..samples {
        let h = Trajectory::from_fn(*u.time(), |i| {
            lo[i].zip_map(&hi[i], |a, b| if a < b { rng.gen_range(a..=b) } else { a })
        });
        vi_slack = vi_slack.min(inner(ops, &gu, &h.axpy(-1.0, u)));
    }
    Ok(OptimalityResiduals {
        fixed_point,
        linear,
        vi_slack,
    })
}

/// Projected gradient descent on `(u, v)` with Armijo backtracking.
///
/// Starts from `proj_𝒦(0), 0` unless `warm` supplies a start (projected
/// onto `𝒦`). Trial points whose state solve fails count as rejected.
pub fn solve_ocp(inst: &OcpInstance, opts: &OcpOptions, warm: Option<(&Trajectory, &Trajectory)>) -> Result<OcpReport> {
    let si = &inst.state;
    si.validate()?;
    let ops = &*si.ops;
    let params = &si.params;
    let (mut u, mut v) = match warm {
        Some((u0, v0)) => (project_box(&inst.constraint, u0)?, v0.clone()),
        None => (
            project_box(&inst.constraint, &Trajectory::zeros(si.time, ops.nodes()))?,
            Trajectory::zeros(si.time, ops.nodes()),
        ),
    };
    let (mut state, mut j) = evaluate(si, &u, &v)?;
    let mut history = Vec::new();
    let mut stop = StopReason::MaxIterations;
    let mut adjoint;
    let mut it = 0;
    let mut prev: Option<[Trajectory; 4]> = None;
    loop {
        adjoint = solve_adjoint(si, &state)?;
        let (gu, gv) = gateaux_gradient(&u, &v, &adjoint, params);
        let mut s = prev
            .take()
            .and_then(|[pu, pv, pgu, pgv]| bb_step(ops, [&u.axpy(-1.0, &pu), &v.axpy(-1.0, &pv)], [&gu.axpy(-1.0, &pgu), &gv.axpy(-1.0, &pgv)]))
            .unwrap_or(opts.initial_step);
        let pg = u.axpy(-1.0, &project_box(&inst.constraint, &u.axpy(-1.0, &gu))?);
        let residual = h_norm(ops, &pg) + h_norm(ops, &gv);
        let mut record = IterationRecord {
            iteration: it,
            cost: j,
            residual,
            step: 0.0,
            halvings: 0,
        };
        if residual <= opts.tol {
            history.push(record);
            stop = StopReason::Converged;
            break;
        }
        if it == opts.max_iter {
            history.push(record);
            break;
        }
        let mut accepted = None;
        for halvings in 0..=opts.max_halvings {
            let ut = project_box(&inst.constraint, &u.axpy(-s, &gu))?;
            let vt = v.axpy(-s, &gv);
            let slope = inner(ops, &gu, &ut.axpy(-1.0, &u)) + inner(ops, &gv, &vt.axpy(-1.0, &v));
            if let Ok((st, jt)) = evaluate(si, &ut, &vt) {
                if jt <= j + opts.armijo * slope {
                    accepted = Some((ut, vt, st, jt, halvings));
                    break;
                }
            }
            s *= opts.shrink;
        }
        match accepted {
            Some((ut, vt, st, jt, halvings)) => {
                record.step = s;
                record.halvings = halvings;
                history.push(record);
                prev = Some([u, v, gu, gv]);
                u = ut;
                v = vt;
                state = st;
                j = jt;
                it += 1;
            }
            None => {
                record.halvings = opts.max_halvings;
                history.push(record);
                stop = StopReason::LineSearch {
                    halvings: opts.max_halvings,
                    gradient_norm: h_norm(ops, &gu) + h_norm(ops, &gv),
                };
                break;
            }
        }
    }
    let residuals = optimality_residuals(&u, &v, &adjoint, params, &inst.constraint, ops, opts.vi_samples, opts.seed)?;
    Ok(OcpReport {
        u,
        v,
        state,
        adjoint,
        history,
        residuals,
        stop,
    })
}
