//! A-priori estimates of the linear scheme, the continuous-dependence bound
//! between two linear problems, and the two-sided bounds of `𝒫`.
//!
//! Every check compares a computed left side with a computed right side;
//! `holds` is `lhs ≤ rhs + 1e-9·|rhs|` (infinite right sides always hold).

use nalgebra::Vector2;
use serde::Serialize;

use super::step::{LinearProblem, LinearSolution};
use crate::numerics::{traj_v_sq, traj_vstar_sq, DiscreteOperators, ScalarField, TimeRule, Trajectory};
use crate::state::ProblemParams;

/// Relative slack allowed in the estimate checks.
pub const ESTIMATE_SLACK: f64 = 1e-9;
/// Relative slack allowed in the continuous-dependence check.
pub const GRONWALL_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub lhs: f64,
    pub rhs: f64,
}

impl Estimate {
    pub fn holds_with(&self, slack: f64) -> bool {
        self.rhs == f64::INFINITY || self.lhs <= self.rhs + slack * self.rhs.abs()
    }

    pub fn holds(&self) -> bool {
        self.holds_with(ESTIMATE_SLACK)
    }

    /// `(rhs − lhs)/|rhs|`; `+∞` when the right side overflowed.
    pub fn relative_slack(&self) -> f64 {
        if self.rhs == f64::INFINITY {
            f64::INFINITY
        } else {
            (self.rhs - self.lhs) / self.rhs.abs().max(f64::MIN_POSITIVE)
        }
    }

    /// `lhs/rhs`, or `None` when the ratio carries no information.
    pub fn ratio(&self) -> Option<f64> {
        (self.rhs > 0.0 && self.rhs.is_finite()).then(|| self.lhs / self.rhs)
    }
}

fn max_ratio<'a>(it: impl Iterator<Item = &'a Estimate>) -> f64 {
    it.filter_map(Estimate::ratio).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub c1: f64,
    pub c2: f64,
    /// `X_i` for `i = 0..=n_τ`.
    pub energy: Vec<f64>,
    /// The uniform bound on `X_i`, one entry per node.
    pub uniform: Vec<Estimate>,
    pub p_increments: Estimate,
    pub z_increments: Estimate,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.uniform.iter().all(Estimate::holds) && self.p_increments.holds() && self.z_increments.holds()
    }

    /// Smallest relative slack over all estimates.
    pub fn worst_slack(&self) -> f64 {
        self.uniform
            .iter()
            .chain([&self.p_increments, &self.z_increments])
            .map(Estimate::relative_slack)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `lhs/rhs` over all estimates: how close the run came to a bound.
    pub fn tightest(&self) -> f64 {
        max_ratio(self.uniform.iter().chain([&self.p_increments, &self.z_increments]))
    }
}

/// `|w|_H² + μ²|∇w|² + |√a z|² + ν²|∇z|²` with the lumped `a`-weighted mass.
fn weighted_energy(ops: &DiscreteOperators, p: &ProblemParams, a: &ScalarField, pw: &ScalarField, zw: &ScalarField) -> f64 {
    let az: f64 = (0..zw.len()).map(|j| ops.lumped()[j] * a[j] * zw[j] * zw[j]).sum();
    ops.norm_h_sq(pw) + p.mu * p.mu * ops.grad_sq(pw) + az + p.nu * p.nu * ops.grad_sq(zw)
}

/// The energy bounds for one solved linear problem.
pub fn stability_check(
    prob: &LinearProblem,
    sol: &LinearSolution,
    params: &ProblemParams,
    ops: &DiscreteOperators,
) -> StabilityReport {
    let sep = &prob.sep;
    let nr = sep.norms();
    let d = sep.delta_a;
    let c_sq = params.c_emb * params.c_emb;
    let horizon = params.horizon;
    let c1 = 8.0 * (c_sq + 1.0) / params.coercivity(d)
        * (nr.dt_a + nr.b + nr.c + nr.lambda + nr.xi + nr.omega_inf + 1.0);
    let low2 = 1f64.min(d * d).min(params.mu.powi(4)).min(params.nu.powi(4));
    let c2 = 17.0 * (c_sq * c_sq + 1.0) * (horizon + 1.0)
        * (1.0 + params.mu * params.mu + params.nu * params.nu + c_sq * nr.a0)
        / low2;

    let energy: Vec<f64> = (0..sol.p.len())
        .map(|i| weighted_energy(ops, params, &sep.a[i], &sol.p[i], &sol.z[i]))
        .collect();
    let forcing = traj_vstar_sq(ops, &prob.h, TimeRule::Forward) + traj_vstar_sq(ops, &prob.k, TimeRule::Forward);
    let bound1 = (4.0 * c1 * (horizon + 1.0)).exp() * energy[0] + 2.0 * forcing;
    let uniform = energy.iter().map(|&x| Estimate { lhs: x, rhs: bound1 }).collect();

    let tau = sep.time().tau();
    let incr = |w: &Trajectory| -> f64 { (1..w.len()).map(|i| ops.norm_v_sq(&(&w[i] - &w[i - 1]))).sum() };
    let data = ops.norm_v_sq(&prob.p0) + ops.norm_v_sq(&prob.z0) + forcing;
    let growth = c2 * (5.0 * c1 * (horizon + 1.0)).exp();
    let p_increments = Estimate {
        lhs: 1f64.min(params.mu * params.mu) / (4.0 * tau) * incr(&sol.p),
        rhs: growth * data,
    };
    let z_increments = Estimate {
        lhs: d.min(params.nu * params.nu) / (4.0 * tau) * incr(&sol.z),
        rhs: growth * (nr.big_a_inf * nr.big_a_inf + 1.0) * data,
    };
    StabilityReport {
        c1,
        c2,
        energy,
        uniform,
        p_increments,
        z_increments,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    /// `J(t_i)` against its bound, one entry per node.
    pub trace: Vec<Estimate>,
}

impl GronwallReport {
    pub fn holds(&self) -> bool {
        self.trace.iter().all(|e| e.holds_with(GRONWALL_SLACK))
    }

    pub fn worst_slack(&self) -> f64 {
        self.trace.iter().map(Estimate::relative_slack).fold(f64::INFINITY, f64::min)
    }

    pub fn tightest(&self) -> f64 {
        max_ratio(self.trace.iter())
    }
}

/// Continuous dependence of the discrete solutions of two linear problems
/// on the same grids. Time integrals use the forward rule.
pub fn gronwall_diagnostic(
    first: (&LinearProblem, &LinearSolution),
    second: (&LinearProblem, &LinearSolution),
    params: &ProblemParams,
    ops: &DiscreteOperators,
) -> GronwallReport {
    let (pr1, s1) = first;
    let (pr2, s2) = second;
    let (sep1, sep2) = (&pr1.sep, &pr2.sep);
    let tg = *sep1.time();
    let tau = tg.tau();
    let n = tg.steps();
    let c_sq = params.c_emb * params.c_emb;
    let grid = ops.grid();
    let dim = grid.dim();
    let lead = 12.0 * (c_sq + 1.0) / params.coercivity(sep1.delta_a);

    let r0 = |i: usize| -> f64 {
        let da = if i == 0 {
            (&sep1.a[1] - &sep1.a[0]) / tau
        } else {
            (&sep1.a[i] - &sep1.a[i - 1]) / tau
        };
        let om = sep1.omega[i].iter().map(|w| w.norm()).fold(0.0, f64::max);
        lead * (ops.norm_h(&sep1.lambda[i])
            + ops.norm_h(&sep1.xi[i])
            + ops.norm_h(&da)
            + ops.norm_h(&sep1.b[i])
            + ops.norm_h(&sep1.c[i])
            + om
            + 1.0)
    };
    let r1 = |i: usize| -> f64 {
        let dh = |a: &Trajectory, b: &Trajectory| ops.norm_h_sq(&(&a[i] - &b[i]));
        let p2 = &s2.p[i];
        let z2 = &s2.z[i];
        let gz = ops.gradient(z2);
        let mut conv = 0.0;
        let mut diff = 0.0;
        let mut transp = 0.0;
        for (e, el) in grid.elements().iter().enumerate() {
            let dw: Vector2<f64> = sep1.omega[i][e] - sep2.omega[i][e];
            let da = sep1.big_a[i][e] - sep2.big_a[i][e];
            conv += el.measure * gz[e].dot(&dw).powi(2);
            diff += el.measure * (da * gz[e]).norm_squared();
            // ∫_e p² for a P1 field.
            let v = el.vertices(dim);
            let s: f64 = v.iter().map(|&j| p2[j]).sum();
            let sq: f64 = v.iter().map(|&j| p2[j] * p2[j]).sum();
            let k = (dim + 1) as f64;
            let p2_int = el.measure * (sq + s * s) / (k * (k + 1.0));
            transp += dw.norm_squared() * p2_int;
        }
        ops.norm_v_sq(p2) * (dh(&sep1.lambda, &sep2.lambda) + dh(&sep1.c, &sep2.c))
            + ops.norm_v_sq(z2) * (dh(&sep1.xi, &sep2.xi) + dh(&sep1.a, &sep2.a) + dh(&sep1.b, &sep2.b))
            + conv
            + diff
            + transp
    };
    let j = |i: usize| -> f64 {
        let dp = &s1.p[i] - &s2.p[i];
        let dz = &s1.z[i] - &s2.z[i];
        weighted_energy(ops, params, &sep1.a[i], &dp, &dz)
    };

    let j0 = j(0);
    let mut int_r0 = 0.0;
    let mut int_f = 0.0;
    let mut int_r1 = 0.0;
    let mut trace = vec![Estimate { lhs: j0, rhs: j0 }];
    for i in 1..=n {
        let w = tg.weight(i, TimeRule::Forward);
        int_r0 += w * r0(i);
        int_f += w
            * (ops.vstar_norm_sq(&(&pr1.h[i] - &pr2.h[i])) + ops.vstar_norm_sq(&(&pr1.k[i] - &pr2.k[i])));
        int_r1 += w * r1(i);
        trace.push(Estimate {
            lhs: j(i),
            rhs: int_r0.exp() * (j0 + int_f + (c_sq + 1.0) * int_r1),
        });
    }
    GronwallReport { trace }
}

/// `M₀*` and `M₁*` of the two-sided bound
/// `M₀*·|[p₀,z₀,h,k]| ≤ ‖[p,z]‖ ≤ M₁*·|[p₀,z₀,h,k]|`.
pub fn solution_bounds(prob: &LinearProblem, params: &ProblemParams) -> (f64, f64) {
    let sep = &prob.sep;
    let nr = sep.norms();
    let d = sep.delta_a;
    let (mu2, nu2) = (params.mu * params.mu, params.nu * params.nu);
    let c_sq = params.c_emb * params.c_emb;
    let horizon = params.horizon;
    let c1 = 8.0 * (c_sq + 1.0) / params.coercivity(d)
        * (nr.dt_a + nr.b + nr.c + nr.lambda + nr.xi + nr.omega_inf + 1.0);
    let low2 = 1f64.min(d * d).min(params.mu.powi(4)).min(params.nu.powi(4));
    let c2 = 17.0 * (c_sq * c_sq + 1.0) * (horizon + 1.0) * (1.0 + mu2 + nu2 + c_sq * nr.a0) / low2;
    let m1 = (48.0 * (1.0 + mu2 + nu2 + c_sq) * nr.a0 / params.coercivity(d)
        * c2
        * (5.0 * c1 * (horizon + 1.0)).exp()
        * (nr.big_a_inf + 1.0))
        .sqrt();
    let c4 = 4.0 * 2f64.sqrt() * (1.0 + mu2 + nu2) * (1.0 + c_sq);
    let sum = nr.a_sup + nr.b + nr.c + nr.lambda + nr.xi + nr.big_a_inf + nr.omega_inf + 1.0;
    let m0 = 1.0 / (2f64.sqrt() * (c4 + 1.0) * sum);
    (m0, m1)
}

/// `|[p,z]|_{W^{1,2}(0,T;V)²} + max_i (|p_i|_V² + |z_i|_V²)^{1/2}`.
pub fn solution_norm(sol: &LinearSolution, ops: &DiscreteOperators) -> f64 {
    let tau = sol.p.time().tau();
    let dt = |w: &Trajectory| -> f64 {
        (1..w.len())
            .map(|i| w.time().weight(i, TimeRule::Forward) * ops.norm_v_sq(&((&w[i] - &w[i - 1]) / tau)))
            .sum()
    };
    let w12 = traj_v_sq(ops, &sol.p, TimeRule::Forward)
        + traj_v_sq(ops, &sol.z, TimeRule::Forward)
        + dt(&sol.p)
        + dt(&sol.z);
    let sup = (0..sol.p.len())
        .map(|i| ops.norm_v_sq(&sol.p[i]) + ops.norm_v_sq(&sol.z[i]))
        .fold(0.0, f64::max);
    w12.sqrt() + sup.sqrt()
}

/// `|[p₀, z₀, h, k]|` in `V² × 𝒱*²`.
pub fn input_norm(prob: &LinearProblem, ops: &DiscreteOperators) -> f64 {
    (ops.norm_v_sq(&prob.p0)
        + ops.norm_v_sq(&prob.z0)
        + traj_vstar_sq(ops, &prob.h, TimeRule::Forward)
        + traj_vstar_sq(ops, &prob.k, TimeRule::Forward))
    .sqrt()
}
