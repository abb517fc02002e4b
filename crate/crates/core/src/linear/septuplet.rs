//! Coefficient septuplets `[a, b, c, λ, ξ, ω, A]` and the step-size bounds
//! they induce.

use nalgebra::{Matrix2, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numerics::{
    linf_matrix, linf_vector, traj_dt_h_sq, traj_h_sq, DiscreteOperators, MatrixField, TimeGrid,
    TimeRule, Trajectory, VectorField,
};
use crate::state::ProblemParams;

/// Raw coefficient series at `t_0, …, t_{n_τ}`; step `i` of the scheme
/// reads frame `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeptupletData {
    pub a: Trajectory,
    pub b: Trajectory,
    pub c: Trajectory,
    pub lambda: Trajectory,
    pub xi: Trajectory,
    pub omega: Trajectory<VectorField>,
    pub big_a: Trajectory<MatrixField>,
    pub delta_a: f64,
}

/// Norms the bounds depend on. `𝓗` norms integrate the forward interpolant,
/// which is what the scheme consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeptupletNorms {
    pub dt_a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
    pub xi: f64,
    pub omega_inf: f64,
    pub big_a_inf: f64,
    /// `|a(0)|_H`.
    pub a0: f64,
    /// `max_i |a_i|_H`.
    pub a_sup: f64,
}

/// A septuplet that passed [`validate_septuplet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Septuplet {
    data: SeptupletData,
    norms: SeptupletNorms,
}

impl std::ops::Deref for Septuplet {
    type Target = SeptupletData;
    fn deref(&self) -> &SeptupletData {
        &self.data
    }
}

impl Septuplet {
    pub fn norms(&self) -> &SeptupletNorms {
        &self.norms
    }

    pub fn time(&self) -> &TimeGrid {
        self.data.a.time()
    }

    pub fn data(&self) -> &SeptupletData {
        &self.data
    }

    pub fn into_data(self) -> SeptupletData {
        self.data
    }
}

impl SeptupletData {
    /// `a ≡ 1, A ≡ I`, everything else zero.
    pub fn identity(ops: &DiscreteOperators, time: TimeGrid) -> Self {
        let n = ops.nodes();
        let ne = ops.grid().elements().len();
        let dim = ops.grid().dim();
        let eye = if dim == 1 {
            Matrix2::new(1.0, 0.0, 0.0, 0.0)
        } else {
            Matrix2::identity()
        };
        SeptupletData {
            a: Trajectory::constant(time, nalgebra::DVector::from_element(n, 1.0)),
            b: Trajectory::zeros(time, n),
            c: Trajectory::zeros(time, n),
            lambda: Trajectory::zeros(time, n),
            xi: Trajectory::zeros(time, n),
            omega: Trajectory::from_fn(time, |_| vec![nalgebra::Vector2::zeros(); ne]),
            big_a: Trajectory::from_fn(time, |_| vec![eye; ne]),
            delta_a: 1.0,
        }
    }

    /// `𝒯` applied to every coefficient.
    pub fn reversed(&self) -> Self {
        SeptupletData {
            a: self.a.reversed(),
            b: self.b.reversed(),
            c: self.c.reversed(),
            lambda: self.lambda.reversed(),
            xi: self.xi.reversed(),
            omega: self.omega.reversed(),
            big_a: self.big_a.reversed(),
            delta_a: self.delta_a,
        }
    }
}

/// Checks `a ≥ δ_a`, symmetry and semidefiniteness of `A`, layouts and
/// finiteness, then caches the norms.
pub fn validate_septuplet(data: SeptupletData, ops: &DiscreteOperators) -> Result<Septuplet> {
    let n = ops.nodes();
    let ne = ops.grid().elements().len();
    let tg = *data.a.time();
    if !(data.delta_a > 0.0) {
        return Err(Error::Septuplet(format!("δ_a = {} must be positive", data.delta_a)));
    }
    for (name, s) in [
        ("a", &data.a),
        ("b", &data.b),
        ("c", &data.c),
        ("lambda", &data.lambda),
        ("xi", &data.xi),
    ] {
        if s.time() != &tg || s.frames().iter().any(|f| f.len() != n) {
            return Err(Error::Septuplet(format!("{name} does not match the grids")));
        }
        if !s.is_finite() {
            return Err(Error::Septuplet(format!("{name} is not finite")));
        }
    }
    if data.omega.time() != &tg || data.omega.frames().iter().any(|f| f.len() != ne) {
        return Err(Error::Septuplet("omega does not match the grids".into()));
    }
    if data.big_a.time() != &tg || data.big_a.frames().iter().any(|f| f.len() != ne) {
        return Err(Error::Septuplet("A does not match the grids".into()));
    }
    for (i, f) in data.a.frames().iter().enumerate() {
        if let Some(j) = (0..n).find(|&j| !(f[j] >= data.delta_a)) {
            return Err(Error::Septuplet(format!(
                "a = {} < δ_a = {} at frame {i}, node {j}",
                f[j], data.delta_a
            )));
        }
    }
    for (i, f) in data.omega.frames().iter().enumerate() {
        if f.iter().any(|w| !w.iter().all(|v| v.is_finite())) {
            return Err(Error::Septuplet(format!("omega is not finite at frame {i}")));
        }
    }
    let mut worst: Option<(f64, usize, usize)> = None;
    for (i, f) in data.big_a.frames().iter().enumerate() {
        for (e, m) in f.iter().enumerate() {
            if !m.iter().all(|v| v.is_finite()) {
                return Err(Error::Septuplet(format!("A is not finite at frame {i}, element {e}")));
            }
            let asym = (m[(0, 1)] - m[(1, 0)]).abs();
            if asym > 1e-14 * (1.0 + m.amax()) {
                return Err(Error::Septuplet(format!(
                    "A is asymmetric by {asym:e} at frame {i}, element {e}"
                )));
            }
            let min_eig = SymmetricEigen::new(*m).eigenvalues.min();
            if worst.is_none_or(|w| min_eig < w.0) {
                worst = Some((min_eig, i, e));
            }
        }
    }
    if let Some((ev, i, e)) = worst {
        if ev < -1e-12 {
            return Err(Error::Septuplet(format!(
                "A is indefinite (eigenvalue {ev:e}) at frame {i}, element {e}"
            )));
        }
    }
    let h = |s: &Trajectory| traj_h_sq(ops, s, TimeRule::Forward).sqrt();
    let norms = SeptupletNorms {
        dt_a: traj_dt_h_sq(ops, &data.a).sqrt(),
        b: h(&data.b),
        c: h(&data.c),
        lambda: h(&data.lambda),
        xi: h(&data.xi),
        omega_inf: linf_vector(&data.omega),
        big_a_inf: linf_matrix(&data.big_a),
        a0: ops.norm_h(&data.a[0]),
        a_sup: data.a.frames().iter().map(|f| ops.norm_h(f)).fold(0.0, f64::max),
    };
    let all = [
        norms.dt_a,
        norms.b,
        norms.c,
        norms.lambda,
        norms.xi,
        norms.omega_inf,
        norms.big_a_inf,
        norms.a0,
        norms.a_sup,
    ];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::Septuplet("a cached norm is not finite".into()));
    }
    Ok(Septuplet { data, norms })
}

/// `(1 ∧ δ_a ∧ μ² ∧ ν²) / (8(C²+1)(|λ|_𝓗 + |b|_𝓗 + |ω|_∞ + 1))`.
///
/// ```
/// use kwcopt::linear::{tau1, validate_septuplet, SeptupletData};
/// use kwcopt::numerics::{assemble_operators, build_grid, TimeGrid};
/// use kwcopt::state::ProblemParams;
/// let ops = assemble_operators(&build_grid(1, &[5], &[1.0]).unwrap()).unwrap();
/// let sep = validate_septuplet(SeptupletData::identity(&ops, TimeGrid::new(1.0, 0.01).unwrap()), &ops).unwrap();
/// let params = ProblemParams { c_emb: 1.0, ..ProblemParams::default() };
/// assert_eq!(tau1(&sep, &params), 1.0 / 16.0);
/// ```
pub fn tau1(sep: &Septuplet, p: &ProblemParams) -> f64 {
    let n = &sep.norms;
    p.coercivity(sep.delta_a)
        / (8.0 * (p.c_emb * p.c_emb + 1.0) * (n.lambda + n.b + n.omega_inf + 1.0))
}

/// The second step bound, never above [`tau1`].
pub fn tau2(sep: &Septuplet, p: &ProblemParams) -> f64 {
    let n = &sep.norms;
    let d = sep.delta_a;
    let num = 1f64.min(d * d).min(p.mu.powi(4)).min(p.nu.powi(4));
    let c2 = p.c_emb * p.c_emb + 1.0;
    let s = n.lambda + n.xi + n.b + n.c + n.dt_a + n.omega_inf + 1.0;
    (num / (16.0 * c2 * c2 * s * s)).min(tau1(sep, p))
}
