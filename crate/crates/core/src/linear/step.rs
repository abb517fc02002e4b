//! The implicit coupled scheme for the linear system and its inverse.
//!
//! Unknowns of one step are interleaved (`p_j` at `2j`, `z_j` at `2j+1`) so
//! the block matrix keeps the bandwidth of the spatial operators.

use nalgebra::DVector;

use super::septuplet::{tau1, Septuplet};
use crate::error::{Error, Result};
use crate::numerics::{BandedLu, CsrMatrix, DiscreteOperators, ScalarField, SpatialGrid, TimeGrid, Trajectory};
use crate::state::ProblemParams;

/// Inputs of `𝒫`: a septuplet, initial data and forcings. Frame 0 of the
/// forcings is never read.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    pub sep: Septuplet,
    pub p0: ScalarField,
    pub z0: ScalarField,
    pub h: Trajectory,
    pub k: Trajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub p: Trajectory,
    pub z: Trajectory,
}

/// The four blocks of step `i` and the matrices acting on the previous level.
struct StepMatrices {
    pub tl: CsrMatrix,
    pub tr: CsrMatrix,
    pub bl: CsrMatrix,
    pub br: CsrMatrix,
    /// `(M + μ²K)/τ`.
    pub pp: CsrMatrix,
    /// `(D_a + ν²K)/τ`.
    pub zz: CsrMatrix,
    pub d_xi: CsrMatrix,
    pub d_c: CsrMatrix,
}

impl StepMatrices {
    pub fn new(sep: &Septuplet, i: usize, p: &ProblemParams, ops: &DiscreteOperators) -> Self {
        let tau = sep.time().tau();
        let pp = CsrMatrix::lincomb(&[(1.0 / tau, ops.mass()), (p.mu * p.mu / tau, ops.stiffness())]);
        let zz = CsrMatrix::lincomb(&[
            (1.0 / tau, &ops.lumped_mass(&sep.a[i])),
            (p.nu * p.nu / tau, ops.stiffness()),
        ]);
        let tl = CsrMatrix::lincomb(&[
            (1.0, &pp),
            (1.0, ops.stiffness()),
            (1.0, &ops.lumped_mass(&sep.lambda[i])),
        ]);
        let br = CsrMatrix::lincomb(&[
            (1.0, &zz),
            (1.0, &ops.lumped_mass(&sep.b[i])),
            (1.0, &ops.weighted_stiffness(&sep.big_a[i])),
        ]);
        StepMatrices {
            tl,
            tr: ops.convection(&sep.omega[i]),
            bl: ops.transport(&sep.omega[i]),
            br,
            pp,
            zz,
            d_xi: ops.lumped_mass(&sep.xi[i]),
            d_c: ops.lumped_mass(&sep.c[i]),
        }
    }

    pub fn block(&self) -> CsrMatrix {
        let n = self.tl.nrows();
        let mut t = Vec::new();
        for (m, (ro, co)) in [
            (&self.tl, (0, 0)),
            (&self.tr, (0, 1)),
            (&self.bl, (1, 0)),
            (&self.br, (1, 1)),
        ] {
            t.extend(m.triplets().map(|(r, c, v)| (2 * r + ro, 2 * c + co, v)));
        }
        CsrMatrix::from_triplets(2 * n, 2 * n, t)
    }

    /// Load vectors of the right-hand side without forcing.
    pub fn history(&self, p_prev: &ScalarField, z_prev: &ScalarField) -> (DVector<f64>, DVector<f64>) {
        (
            self.pp.mul_vec(p_prev) - self.d_xi.mul_vec(z_prev),
            self.zz.mul_vec(z_prev) - self.d_c.mul_vec(p_prev),
        )
    }

    /// Block operator applied to `[p, z]`, as two load vectors.
    pub fn apply(&self, p: &ScalarField, z: &ScalarField) -> (DVector<f64>, DVector<f64>) {
        (
            self.tl.mul_vec(p) + self.tr.mul_vec(z),
            self.bl.mul_vec(p) + self.br.mul_vec(z),
        )
    }
}

fn interleave(p: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(2 * p.len(), |r, _| if r % 2 == 0 { p[r / 2] } else { z[r / 2] })
}

fn split(x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let n = x.len() / 2;
    (
        DVector::from_fn(n, |j, _| x[2 * j]),
        DVector::from_fn(n, |j, _| x[2 * j + 1]),
    )
}

fn check_step(sep: &Septuplet, params: &ProblemParams) -> Result<()> {
    let tau = sep.time().tau();
    let t1 = tau1(sep, params);
    if !(tau < t1) {
        return Err(Error::StepTooLarge { tau, tau1: t1 });
    }
    Ok(())
}

/// Advances `[p_{i−1}, z_{i−1}]` to `[p_i, z_i]`; `h_i, k_i` are H-fields.
///
/// Refuses `τ ≥ τ₁`, where unique solvability is not guaranteed.
#[allow(clippy::too_many_arguments)]
pub fn step_linear(
    sep: &Septuplet,
    i: usize,
    p_prev: &ScalarField,
    z_prev: &ScalarField,
    h_i: &ScalarField,
    k_i: &ScalarField,
    params: &ProblemParams,
    ops: &DiscreteOperators,
) -> Result<(ScalarField, ScalarField)> {
    check_step(sep, params)?;
    if i == 0 || i > sep.time().steps() {
        return Err(Error::Input(format!("step index {i} outside 1..={}", sep.time().steps())));
    }
    let sm = StepMatrices::new(sep, i, params, ops);
    let (hp, hz) = sm.history(p_prev, z_prev);
    let rhs = interleave(&(hp + ops.mass().mul_vec(h_i)), &(hz + ops.mass().mul_vec(k_i)));
    Ok(split(&BandedLu::factor(&sm.block())?.solve(&rhs)))
}

/// The solution operator `𝒫`.
pub fn solve_linear(
    prob: &LinearProblem,
    params: &ProblemParams,
    ops: &DiscreteOperators,
) -> Result<LinearSolution> {
    check_step(&prob.sep, params)?;
    let tg = *prob.sep.time();
    let n = ops.nodes();
    for (name, f) in [("p0", &prob.p0), ("z0", &prob.z0)] {
        if f.len() != n || f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!("{name} must hold {n} finite values")));
        }
    }
    for (name, f) in [("h", &prob.h), ("k", &prob.k)] {
        if f.time() != &tg || f.frames().iter().any(|w| w.len() != n) || !f.is_finite() {
            return Err(Error::Input(format!("forcing {name} does not match the grids")));
        }
    }
    let mut p = vec![prob.p0.clone()];
    let mut z = vec![prob.z0.clone()];
    for i in 1..=tg.steps() {
        let (pi, zi) = step_linear(&prob.sep, i, &p[i - 1], &z[i - 1], &prob.h[i], &prob.k[i], params, ops)?;
        p.push(pi);
        z.push(zi);
    }
    Ok(LinearSolution {
        p: Trajectory::new(tg, p)?,
        z: Trajectory::new(tg, z)?,
    })
}

/// The forcing map `𝒬`: the H-represented residuals of each step, so that
/// `𝒫(𝒬[p, z])` returns `[p, z]`. Frame 0 is zero.
pub fn residual_forcing(
    sep: &Septuplet,
    sol: &LinearSolution,
    params: &ProblemParams,
    ops: &DiscreteOperators,
) -> (Trajectory, Trajectory) {
    let tg = *sep.time();
    let n = ops.nodes();
    let mut h = vec![DVector::zeros(n)];
    let mut k = vec![DVector::zeros(n)];
    for i in 1..=tg.steps() {
        let sm = StepMatrices::new(sep, i, params, ops);
        let (ap, az) = sm.apply(&sol.p[i], &sol.z[i]);
        let (hp, hz) = sm.history(&sol.p[i - 1], &sol.z[i - 1]);
        h.push(ops.mass_solve(&(ap - hp)));
        k.push(ops.mass_solve(&(az - hz)));
    }
    (Trajectory::from_fn(tg, |i| h[i].clone()), Trajectory::from_fn(tg, |i| k[i].clone()))
}

/// Interval averages `(1/τ)∫_{t_{i−1}}^{t_i} f(t, x_j) dt` by three-point
/// Gauss–Legendre per interval; frame 0 holds `f(0, ·)`.
pub fn average_forcing(grid: &SpatialGrid, time: TimeGrid, f: impl Fn(f64, &[f64]) -> f64) -> Trajectory {
    let nodes = [-(0.6f64.sqrt()), 0.0, 0.6f64.sqrt()];
    let weights = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let coords = grid.coords();
    let dim = grid.dim();
    Trajectory::from_fn(time, |i| {
        DVector::from_fn(coords.len(), |j, _| {
            let x = &coords[j][..dim];
            if i == 0 {
                return f(0.0, x);
            }
            let (a, b) = (time.t(i - 1), time.t(i));
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            nodes
                .iter()
                .zip(weights)
                .map(|(s, w)| w * f(mid + half * s, x))
                .sum()
        })
    })
}
