//! Brute-force references for the test suite and the `check` command:
//! dense space-time assembly of the linear scheme with its exact transpose,
//! and central finite differences of the cost.
//!
//! Nothing here reuses the step assembly of [`crate::linear`]; only the base
//! mass, stiffness and weighted-stiffness matrices are shared.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::control::cost;
use crate::error::{Error, Result};
use crate::linear::{LinearProblem, LinearSolution};
use crate::numerics::{DiscreteOperators, ScalarField, Trajectory};
use crate::state::{solve_state, ProblemParams, StateInstance};

/// Size caps of the dense oracle.
pub const MAX_NODES: usize = 16;
pub const MAX_STEPS: usize = 8;

/// All steps of the linear scheme as one dense system. Unknown
/// `(step i ≥ 1, field f ∈ {p, z}, node j)` sits at row
/// `((i−1)·2 + f)·nodes + j`.
#[derive(Debug, Clone)]
pub struct MonolithicSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub nodes: usize,
    pub steps: usize,
}

impl MonolithicSystem {
    pub fn index(&self, step: usize, field: usize, node: usize) -> usize {
        ((step - 1) * 2 + field) * self.nodes + node
    }

    fn unpack(&self, x: &DVector<f64>, p0: &ScalarField, z0: &ScalarField, tg: crate::numerics::TimeGrid) -> LinearSolution {
        let field = |f: usize, init: &ScalarField| {
            Trajectory::from_fn(tg, |i| {
                if i == 0 {
                    init.clone()
                } else {
                    DVector::from_fn(self.nodes, |j, _| x[self.index(i, f, j)])
                }
            })
        };
        LinearSolution {
            p: field(0, p0),
            z: field(1, z0),
        }
    }
}

fn dense_convection(ops: &DiscreteOperators, w: &crate::numerics::VectorField) -> DMatrix<f64> {
    let n = ops.nodes();
    let grid = ops.grid();
    let dim = grid.dim();
    let mut c = DMatrix::zeros(n, n);
    for (el, we) in grid.elements().iter().zip(w) {
        let verts = el.vertices(dim);
        for &row in verts {
            for (q, &col) in verts.iter().enumerate() {
                let dot = we[0] * el.grads[q][0] + we[1] * el.grads[q][1];
                c[(row, col)] += dot * el.measure / verts.len() as f64;
            }
        }
    }
    c
}

fn diag(ops: &DiscreteOperators, c: &ScalarField) -> DMatrix<f64> {
    DMatrix::from_diagonal(&ops.lumped().component_mul(c))
}

/// Dense assembly of every step of the linear scheme for `prob`.
pub fn assemble_spacetime(prob: &LinearProblem, params: &ProblemParams, ops: &DiscreteOperators) -> Result<MonolithicSystem> {
    let n = ops.nodes();
    let tg = *prob.sep.time();
    let steps = tg.steps();
    if n > MAX_NODES || steps > MAX_STEPS {
        return Err(Error::OracleSize(format!(
            "{n} nodes × {steps} steps exceeds {MAX_NODES} × {MAX_STEPS}"
        )));
    }
    let tau = tg.tau();
    let m = ops.mass().to_dense();
    let k = ops.stiffness().to_dense();
    let sep = &prob.sep;
    let mut sys = MonolithicSystem {
        matrix: DMatrix::zeros(2 * n * steps, 2 * n * steps),
        rhs: DVector::zeros(2 * n * steps),
        nodes: n,
        steps,
    };
    let (mu2, nu2) = (params.mu * params.mu, params.nu * params.nu);
    for i in 1..=steps {
        let pp = (&m + &k * mu2) / tau;
        let zz = (diag(ops, &sep.a[i]) + &k * nu2) / tau;
        let tl = &pp + &k + diag(ops, &sep.lambda[i]);
        let c = dense_convection(ops, &sep.omega[i]);
        let br = &zz + diag(ops, &sep.b[i]) + sep_stiffness(ops, &sep.big_a[i]);
        let blocks = [(0, 0, tl), (0, 1, c.clone()), (1, 0, c.transpose()), (1, 1, br)];
        let (r0p, r0z) = (sys.index(i, 0, 0), sys.index(i, 1, 0));
        for (fr, fc, b) in blocks {
            let c0 = sys.index(i, fc, 0);
            let r0 = if fr == 0 { r0p } else { r0z };
            sys.matrix.view_mut((r0, c0), (n, n)).copy_from(&b);
        }
        let xi = diag(ops, &sep.xi[i]);
        let cc = diag(ops, &sep.c[i]);
        let mut rp = &m * &prob.h[i];
        let mut rz = &m * &prob.k[i];
        if i == 1 {
            rp += &pp * &prob.p0 - &xi * &prob.z0;
            rz += &zz * &prob.z0 - &cc * &prob.p0;
        } else {
            let (pc, zc) = (sys.index(i - 1, 0, 0), sys.index(i - 1, 1, 0));
            sys.matrix.view_mut((r0p, pc), (n, n)).copy_from(&(-&pp));
            sys.matrix.view_mut((r0p, zc), (n, n)).copy_from(&xi);
            sys.matrix.view_mut((r0z, pc), (n, n)).copy_from(&cc);
            sys.matrix.view_mut((r0z, zc), (n, n)).copy_from(&(-&zz));
        }
        sys.rhs.rows_mut(r0p, n).copy_from(&rp);
        sys.rhs.rows_mut(r0z, n).copy_from(&rz);
    }
    Ok(sys)
}

fn sep_stiffness(ops: &DiscreteOperators, a: &crate::numerics::MatrixField) -> DMatrix<f64> {
    ops.weighted_stiffness(a).to_dense()
}

/// Solves the monolithic system densely.
pub fn monolithic_solve(prob: &LinearProblem, params: &ProblemParams, ops: &DiscreteOperators) -> Result<LinearSolution> {
    let sys = assemble_spacetime(prob, params, ops)?;
    let x = sys
        .matrix
        .clone()
        .lu()
        .solve(&sys.rhs)
        .ok_or(Error::Singular { row: 0, pivot: 0.0 })?;
    Ok(sys.unpack(&x, &prob.p0, &prob.z0, *prob.sep.time()))
}

/// The pairing `([u, v], 𝒫̄(h, k))` under the backward rule, computed
/// through the transposed monolithic system: solve `Sᵀy = w` for the packed
/// weights `w` of `[u, v]` and return `yᵀF` with `F` the packed forcing.
/// `prob` must have zero initial data.
pub fn transpose_pairing(
    prob: &LinearProblem,
    u: &Trajectory,
    v: &Trajectory,
    params: &ProblemParams,
    ops: &DiscreteOperators,
) -> Result<f64> {
    let sys = assemble_spacetime(prob, params, ops)?;
    let tg = *prob.sep.time();
    let m = ops.mass().to_dense();
    let mut w = DVector::zeros(sys.rhs.len());
    for i in 1..=sys.steps {
        let wt = tg.weight(i, crate::numerics::TimeRule::Backward);
        w.rows_mut(sys.index(i, 0, 0), sys.nodes).copy_from(&(&m * &u[i] * wt));
        w.rows_mut(sys.index(i, 1, 0), sys.nodes).copy_from(&(&m * &v[i] * wt));
    }
    let y = sys
        .matrix
        .transpose()
        .lu()
        .solve(&w)
        .ok_or(Error::Singular { row: 0, pivot: 0.0 })?;
    Ok(y.dot(&sys.rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdEstimate {
    /// Central difference with step `δ`.
    pub value: f64,
    /// Central difference with step `δ/2`.
    pub half: f64,
    /// `|value − half|`, the Richardson consistency gap.
    pub richardson: f64,
}

/// Central differences of the cost along `[du, dv]` at `(u, v)`.
pub fn fd_gradient(
    inst: &StateInstance,
    (u, v): (&Trajectory, &Trajectory),
    (du, dv): (&Trajectory, &Trajectory),
    delta: f64,
) -> Result<FdEstimate> {
    if !(delta > 0.0) {
        return Err(Error::Input(format!("δ = {delta} must be positive")));
    }
    let j = |s: f64| -> Result<f64> {
        let (us, vs) = (u.axpy(s, du), v.axpy(s, dv));
        let st = solve_state(&inst.with_controls(us.clone(), vs.clone()))?;
        Ok(cost(&inst.ops, &inst.params, &st.eta, &st.theta, &inst.eta_ad, &inst.theta_ad, &us, &vs))
    };
    let value = (j(delta)? - j(-delta)?) / (2.0 * delta);
    let half = (j(0.5 * delta)? - j(-0.5 * delta)?) / delta;
    Ok(FdEstimate {
        value,
        half,
        richardson: (value - half).abs(),
    })
}
