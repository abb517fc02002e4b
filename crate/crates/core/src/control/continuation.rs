//! Warm-started sweeps over a decreasing list of `ε`.

use serde::Serialize;

use super::ocp::{solve_ocp, OcpInstance, OcpOptions, OcpReport};
use crate::error::{Error, Result};
use crate::kernel::grad2;
use crate::numerics::{traj_h_sq, DiscreteOperators, TimeRule, Trajectory, VectorField};

/// Threshold on `|∇θ|` above which `ϖ_ε` is compared with `∇θ/|∇θ|`.
pub const DIRECTION_THRESHOLD: f64 = 0.1;

/// Limit-candidate fields of one level.
#[derive(Debug, Clone)]
pub struct EpsLevel {
    pub eps: f64,
    pub report: OcpReport,
    /// `ϖ_ε = ∇γ_ε(∇θ)` per element.
    pub varpi: Trajectory<VectorField>,
    /// `ξ_ε = ∂_tθ · z*` per node (backward differences, forward at `t_0`).
    pub xi: Trajectory,
    /// `σ_ε = ϖ_ε · ∇z*` per element.
    pub sigma: Trajectory<Vec<f64>>,
}

/// Scalar summaries across levels. Entry `n` of the gap and distance series
/// compares level `n+1` with level `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eps0Diagnostics {
    pub eps: Vec<f64>,
    pub costs: Vec<f64>,
    pub cost_gaps: Vec<f64>,
    pub control_distances: Vec<f64>,
    /// `sup |ϖ_ε| − 1` per level.
    pub sgr_gap: Vec<f64>,
    /// `max (|ϖ_ε − ∇θ/|∇θ|| − ε/0.1)` over elements with `|∇θ| ≥ 0.1`,
    /// per level; nonpositive when the bound holds. `−∞` if no element qualifies.
    pub direction_excess: Vec<f64>,
    pub converged: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct ContinuationReport {
    pub levels: Vec<EpsLevel>,
    pub diagnostics: Eps0Diagnostics,
    /// The error that stopped the sweep early; finished levels are kept.
    pub failure: Option<Error>,
}

fn level_fields(ops: &DiscreteOperators, eps: f64, report: &OcpReport) -> EpsLevel {
    let theta = &report.state.theta;
    let z = &report.adjoint.z;
    let tg = *theta.time();
    let varpi = theta.map(|t| ops.gradient(t).iter().map(|y| grad2(eps, y)).collect::<VectorField>());
    let xi = Trajectory::from_fn(tg, |i| {
        let dt = if i == 0 {
            (&theta[1] - &theta[0]) / tg.tau()
        } else {
            (&theta[i] - &theta[i - 1]) / tg.tau()
        };
        dt.component_mul(&z[i])
    });
    let sigma = Trajectory::from_fn(tg, |i| {
        varpi[i].iter().zip(ops.gradient(&z[i])).map(|(w, gz)| w.dot(&gz)).collect()
    });
    EpsLevel {
        eps,
        report: report.clone(),
        varpi,
        xi,
        sigma,
    }
}

fn summarize(ops: &DiscreteOperators, levels: &[EpsLevel]) -> Eps0Diagnostics {
    let dist = |a: &OcpReport, b: &OcpReport| {
        (traj_h_sq(ops, &a.u.axpy(-1.0, &b.u), TimeRule::Forward)
            + traj_h_sq(ops, &a.v.axpy(-1.0, &b.v), TimeRule::Forward))
        .sqrt()
    };
    let mut d = Eps0Diagnostics {
        eps: levels.iter().map(|l| l.eps).collect(),
        costs: levels.iter().map(|l| l.report.cost()).collect(),
        cost_gaps: Vec::new(),
        control_distances: Vec::new(),
        sgr_gap: Vec::new(),
        direction_excess: Vec::new(),
        converged: levels.iter().map(|l| l.report.converged()).collect(),
    };
    for w in levels.windows(2) {
        d.cost_gaps.push((w[1].report.cost() - w[0].report.cost()).abs());
        d.control_distances.push(dist(&w[1].report, &w[0].report));
    }
    for l in levels {
        let sup = l
            .varpi
            .frames()
            .iter()
            .flat_map(|f| f.iter().map(|w| w.norm()))
            .fold(0.0, f64::max);
        d.sgr_gap.push(sup - 1.0);
        let mut excess = f64::NEG_INFINITY;
        for (vf, th) in l.varpi.frames().iter().zip(l.report.state.theta.frames()) {
            for (w, y) in vf.iter().zip(ops.gradient(th)) {
                let ny = y.norm();
                if ny >= DIRECTION_THRESHOLD {
                    excess = excess.max((w - y / ny).norm() - l.eps / DIRECTION_THRESHOLD);
                }
            }
        }
        d.direction_excess.push(excess);
    }
    d
}

/// Solves the control problem for each `ε` in `eps_list`, warm-starting
/// every level from the previous optimizer.
pub fn epsilon_continuation(template: &OcpInstance, eps_list: &[f64], opts: &OcpOptions) -> Result<ContinuationReport> {
    if eps_list.is_empty() {
        return Err(Error::Input("ε list is empty".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Input("ε list must be positive and strictly decreasing".into()));
    }
    let ops = template.state.ops.clone();
    let mut levels: Vec<EpsLevel> = Vec::new();
    let mut failure = None;
    for &eps in eps_list {
        let mut inst = template.clone();
        inst.state.params.eps = eps;
        let warm = levels.last().map(|l| (&l.report.u, &l.report.v));
        match solve_ocp(&inst, opts, warm) {
            Ok(r) => levels.push(level_fields(&ops, eps, &r)),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let diagnostics = summarize(&ops, &levels);
    Ok(ContinuationReport {
        levels,
        diagnostics,
        failure,
    })
}
