//! Box constraints and the projection onto them.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::numerics::{TimeGrid, Trajectory};

/// Pointwise bounds `u̲ ≤ u ≤ ū` on control trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxConstraint {
    lower: Trajectory,
    upper: Trajectory,
}

impl BoxConstraint {
    pub fn new(lower: Trajectory, upper: Trajectory) -> Result<Self> {
        if lower.len() != upper.len() || lower.time() != upper.time() {
            return Err(Error::Input("box bounds have different time layouts".into()));
        }
        for (f, (lo, hi)) in lower.frames().iter().zip(upper.frames()).enumerate() {
            if lo.len() != hi.len() {
                return Err(Error::Input("box bounds have different node counts".into()));
            }
            if let Some(node) = (0..lo.len()).find(|&j| !(lo[j] <= hi[j])) {
                return Err(Error::BoxOrder { frame: f, node });
            }
        }
        Ok(BoxConstraint { lower, upper })
    }

    /// Constant bounds on every node and time.
    pub fn constant(time: TimeGrid, nodes: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(
            Trajectory::constant(time, DVector::from_element(nodes, lo)),
            Trajectory::constant(time, DVector::from_element(nodes, hi)),
        )
    }

    pub fn lower(&self) -> &Trajectory {
        &self.lower
    }

    pub fn upper(&self) -> &Trajectory {
        &self.upper
    }

    pub fn contains(&self, u: &Trajectory) -> bool {
        u.frames().iter().enumerate().all(|(i, f)| {
            f.iter()
                .enumerate()
                .all(|(j, v)| self.lower[i][j] <= *v && *v <= self.upper[i][j])
        })
    }
}

/// Nodewise clamp `u̲ ∨ (ū ∧ u)`.
///
/// ```
/// use kwcopt::kernel::{project_box, BoxConstraint};
/// use kwcopt::numerics::{TimeGrid, Trajectory};
/// use nalgebra::DVector;
/// let tg = TimeGrid::new(1.0, 1.0).unwrap();
/// let k = BoxConstraint::constant(tg, 3, -1.0, 1.0).unwrap();
/// let u = Trajectory::constant(tg, DVector::from_vec(vec![2.0, 0.5, -3.0]));
/// let p = project_box(&k, &u).unwrap();
/// assert_eq!(p[1].as_slice(), &[1.0, 0.5, -1.0]);
/// ```
pub fn project_box(k: &BoxConstraint, u: &Trajectory) -> Result<Trajectory> {
    if u.len() != k.lower.len() || u[0].len() != k.lower[0].len() {
        return Err(Error::Input("control layout does not match the box".into()));
    }
    let mut out = u.clone();
    for (i, f) in out.frames_mut().iter_mut().enumerate() {
        for (j, v) in f.iter_mut().enumerate() {
            *v = v.min(k.upper[i][j]).max(k.lower[i][j]);
        }
    }
    Ok(out)
}
