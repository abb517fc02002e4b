//! Time-integrated norms of trajectories.

use nalgebra::{Matrix2, Vector2};

use super::ops::DiscreteOperators;
use super::time::{TimeRule, Trajectory};

/// `Σᵢ wᵢ·f(i)` with the weights of `rule`.
pub fn time_sum(traj_len: usize, tg: &super::TimeGrid, rule: TimeRule, f: impl Fn(usize) -> f64) -> f64 {
    (0..traj_len)
        .map(|i| {
            let w = tg.weight(i, rule);
            if w == 0.0 {
                0.0
            } else {
                w * f(i)
            }
        })
        .sum()
}

/// `|w|_𝓗²` under the given rule.
///
/// ```
/// use kwcopt::numerics::{assemble_operators, build_grid, traj_h_sq, TimeGrid, TimeRule, Trajectory};
/// use nalgebra::DVector;
/// let ops = assemble_operators(&build_grid(1, &[3], &[1.0]).unwrap()).unwrap();
/// let tg = TimeGrid::new(1.0, 0.25).unwrap();
/// let w = Trajectory::constant(tg, DVector::from_element(3, 2.0));
/// assert!((traj_h_sq(&ops, &w, TimeRule::Backward) - 4.0).abs() < 1e-12);
/// ```
pub fn traj_h_sq(ops: &DiscreteOperators, w: &Trajectory, rule: TimeRule) -> f64 {
    time_sum(w.len(), w.time(), rule, |i| ops.norm_h_sq(&w[i]))
}

pub fn traj_v_sq(ops: &DiscreteOperators, w: &Trajectory, rule: TimeRule) -> f64 {
    time_sum(w.len(), w.time(), rule, |i| ops.norm_v_sq(&w[i]))
}

/// `|h|_{𝒱*}²` of an H-represented forcing.
pub fn traj_vstar_sq(ops: &DiscreteOperators, w: &Trajectory, rule: TimeRule) -> f64 {
    time_sum(w.len(), w.time(), rule, |i| ops.vstar_norm_sq(&w[i]))
}

/// `(a, b)_𝓗`.
pub fn traj_inner(ops: &DiscreteOperators, a: &Trajectory, b: &Trajectory, rule: TimeRule) -> f64 {
    time_sum(a.len(), a.time(), rule, |i| ops.inner_h(&a[i], &b[i]))
}

/// `|∂_t w|_𝓗²` from backward differences, integrated with the forward rule.
pub fn traj_dt_h_sq(ops: &DiscreteOperators, w: &Trajectory) -> f64 {
    let tau = w.time().tau();
    time_sum(w.len(), w.time(), TimeRule::Forward, |i| {
        ops.norm_h_sq(&((&w[i] - &w[i - 1]) / tau))
    })
}

/// Largest Euclidean length over all elements and frames.
pub fn linf_vector(w: &Trajectory<Vec<Vector2<f64>>>) -> f64 {
    w.frames()
        .iter()
        .flat_map(|f| f.iter().map(|v| v.norm()))
        .fold(0.0, f64::max)
}

/// Largest spectral norm over all elements and frames.
pub fn linf_matrix(a: &Trajectory<Vec<Matrix2<f64>>>) -> f64 {
    a.frames()
        .iter()
        .flat_map(|f| f.iter().map(spectral_norm))
        .fold(0.0, f64::max)
}

/// Spectral norm of a 2×2 matrix (largest singular value).
pub fn spectral_norm(m: &Matrix2<f64>) -> f64 {
    let ata = m.transpose() * m;
    let tr = ata.trace();
    let det = ata.determinant();
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr + disc).max(0.0).sqrt()
}
