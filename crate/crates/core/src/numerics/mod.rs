//! Grids, P1 operators, norms, sparse solves and time interpolation.

mod grid;
mod norms;
mod ops;
mod sparse;
mod time;

pub use grid::{build_grid, Element, SpatialGrid};
pub use norms::{
    linf_matrix, linf_vector, spectral_norm, time_sum, traj_dt_h_sq, traj_h_sq, traj_inner,
    traj_v_sq, traj_vstar_sq,
};
pub use ops::{assemble_operators, DiscreteOperators, MatrixField, ScalarField, VectorField};
pub use sparse::{solve_sparse, BandedLu, CsrMatrix};
pub use time::{time_interpolate, Interpolant, TimeGrid, TimeRule, Trajectory};
