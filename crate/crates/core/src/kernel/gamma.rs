//! The regularized length `γ_ε(y) = √(ε² + |y|²)`, its derivatives and the
//! set-valued sign `Sgr`.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::error::{Error, Result};

/// `√(ε² + |y|²)`.
///
/// ```
/// use kwcopt::kernel::gamma_eps;
/// assert_eq!(gamma_eps(1.0, &[0.0]), 1.0);
/// assert_eq!(gamma_eps(0.0, &[3.0, 4.0]), 5.0);
/// ```
pub fn gamma_eps(eps: f64, y: &[f64]) -> f64 {
    let s: f64 = y.iter().map(|v| v * v).sum();
    (eps * eps + s).sqrt()
}

/// `y / γ_ε(y)`. Undefined for `ε = 0` (use [`sgr`]).
pub fn grad_gamma_eps(eps: f64, y: &[f64]) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(Error::ZeroEpsilon("grad_gamma_eps"));
    }
    let g = gamma_eps(eps, y);
    Ok(y.iter().map(|v| v / g).collect())
}

/// `((ε²+|y|²)I − yyᵀ) / (ε²+|y|²)^{3/2}`.
pub fn hess_gamma_eps(eps: f64, y: &[f64]) -> Result<DMatrix<f64>> {
    if !(eps > 0.0) {
        return Err(Error::ZeroEpsilon("hess_gamma_eps"));
    }
    let n = y.len();
    let s = eps * eps + y.iter().map(|v| v * v).sum::<f64>();
    let d = s * s.sqrt();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        ((if i == j { s } else { 0.0 }) - y[i] * y[j]) / d
    }))
}

/// `γ_ε` on a padded 2-vector.
#[inline]
pub(crate) fn gamma2(eps: f64, y: &Vector2<f64>) -> f64 {
    (eps * eps + y.norm_squared()).sqrt()
}

/// `∇γ_ε` on a padded 2-vector; `eps > 0` is the caller's responsibility.
#[inline]
pub(crate) fn grad2(eps: f64, y: &Vector2<f64>) -> Vector2<f64> {
    y / gamma2(eps, y)
}

/// `∇²γ_ε` on a padded 2-vector. In 1D the unused (2,2) slot is zero.
#[inline]
pub(crate) fn hess2(eps: f64, y: &Vector2<f64>, dim: usize) -> Matrix2<f64> {
    let s = eps * eps + y.norm_squared();
    let d = s * s.sqrt();
    let mut h = (Matrix2::identity() * s - y * y.transpose()) / d;
    if dim == 1 {
        h[(0, 1)] = 0.0;
        h[(1, 0)] = 0.0;
        h[(1, 1)] = 0.0;
    }
    h
}

/// Value of the set-valued sign `Sgr(y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Sgr {
    /// `y / |y|` for `y ≠ 0`.
    Unit(Vec<f64>),
    /// The closed unit ball, returned at `y = 0`.
    Ball,
}

impl Sgr {
    /// Whether `w ∈ Sgr(y)`, up to `tol` in each comparison.
    pub fn contains(&self, w: &[f64], tol: f64) -> bool {
        match self {
            Sgr::Unit(u) => u.iter().zip(w).all(|(a, b)| (a - b).abs() <= tol),
            Sgr::Ball => w.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1.0 + tol,
        }
    }
}

/// ```
/// use kwcopt::kernel::{sgr, Sgr};
/// assert_eq!(sgr(&[3.0, 4.0]), Sgr::Unit(vec![0.6, 0.8]));
/// let ball = sgr(&[0.0, 0.0]);
/// assert!(ball.contains(&[0.5, 0.0], 0.0));
/// assert!(!ball.contains(&[1.5, 0.0], 0.0));
/// ```
pub fn sgr(y: &[f64]) -> Sgr {
    let r = gamma_eps(0.0, y);
    if r == 0.0 {
        Sgr::Ball
    } else {
        Sgr::Unit(y.iter().map(|v| v / r).collect())
    }
}
