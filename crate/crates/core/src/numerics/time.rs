//! Uniform time grids, trajectories and the three time interpolants.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// `t_i = iτ` for `i = 0..=n_τ`, with `n_τ = min{n : nτ ≥ T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    tau: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, tau: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Input(format!("horizon T = {horizon} must be positive")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Input(format!("step τ = {tau} must be positive")));
        }
        let mut steps = (horizon / tau).ceil().max(1.0) as usize;
        // Guard the ceiling against representation error in T/τ.
        while steps > 1 && (steps - 1) as f64 * tau >= horizon {
            steps -= 1;
        }
        while (steps as f64) * tau < horizon {
            steps += 1;
        }
        Ok(TimeGrid {
            horizon,
            tau,
            steps,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `n_τ`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.tau
    }

    /// Length of `(t_{i−1}, t_i] ∩ (0, T]`; zero for `i = 0`.
    pub fn interval(&self, i: usize) -> f64 {
        if i == 0 || i > self.steps {
            0.0
        } else {
            (self.t(i).min(self.horizon) - self.t(i - 1)).max(0.0)
        }
    }

    /// Quadrature weight of node `i` under `rule`: the exact integral over
    /// `(0, T)` of the corresponding piecewise-constant interpolant.
    pub fn weight(&self, i: usize, rule: TimeRule) -> f64 {
        match rule {
            TimeRule::Forward => self.interval(i),
            TimeRule::Backward => self.interval(i + 1),
        }
    }
}

/// Piecewise-constant time quadrature.
///
/// `Forward` integrates the forward interpolant `[w̄]_τ` (nodes `1..=n_τ`),
/// `Backward` the backward interpolant `[w̲]_τ` (nodes `0..n_τ`). Both
/// converge at first order; they differ in which endpoint is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeRule {
    Forward,
    Backward,
}

/// Which interpolant `time_interpolate` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolant {
    Forward,
    Backward,
    Linear,
}

/// Values at `t_0, …, t_{n_τ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F = DVector<f64>> {
    time: TimeGrid,
    frames: Vec<F>,
}

impl<F> Trajectory<F> {
    pub fn new(time: TimeGrid, frames: Vec<F>) -> Result<Self> {
        if frames.len() != time.steps() + 1 {
            return Err(Error::Input(format!(
                "trajectory has {} frames, time grid needs {}",
                frames.len(),
                time.steps() + 1
            )));
        }
        Ok(Trajectory { time, frames })
    }

    pub fn from_fn(time: TimeGrid, f: impl FnMut(usize) -> F) -> Self {
        Trajectory {
            time,
            frames: (0..=time.steps()).map(f).collect(),
        }
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn frames(&self) -> &[F] {
        &self.frames
    }

    pub fn frames_mut(&mut self) -> &mut [F] {
        &mut self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last(&self) -> &F {
        self.frames.last().expect("trajectory is never empty")
    }

    pub fn map<G>(&self, f: impl FnMut(&F) -> G) -> Trajectory<G> {
        Trajectory {
            time: self.time,
            frames: self.frames.iter().map(f).collect(),
        }
    }

    /// `w̃_i = w_{n_τ − i}`.
    pub fn reversed(&self) -> Self
    where
        F: Clone,
    {
        Trajectory {
            time: self.time,
            frames: self.frames.iter().rev().cloned().collect(),
        }
    }
}

impl<F> std::ops::Index<usize> for Trajectory<F> {
    type Output = F;
    fn index(&self, i: usize) -> &F {
        &self.frames[i]
    }
}

impl<F> std::ops::IndexMut<usize> for Trajectory<F> {
    fn index_mut(&mut self, i: usize) -> &mut F {
        &mut self.frames[i]
    }
}

impl Trajectory<DVector<f64>> {
    /// Constant-in-time trajectory.
    pub fn constant(time: TimeGrid, field: DVector<f64>) -> Self {
        Self::from_fn(time, |_| field.clone())
    }

    pub fn zeros(time: TimeGrid, nodes: usize) -> Self {
        Self::constant(time, DVector::zeros(nodes))
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|w| w * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Trajectory {
            time: self.time,
            frames: self
                .frames
                .iter()
                .zip(&other.frames)
                .map(|(a, b)| a + b * s)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.frames.iter().map(|w| w.amax()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.frames.iter().all(|w| w.iter().all(|v| v.is_finite()))
    }
}

/// Evaluates one of the three time interpolants of a node sequence.
///
/// * forward: `w_i` on `(t_{i−1}, t_i]`, and `w_0` at `t = 0` (the
///   interpolant's value on `(−∞, 0]` is the sequence's own initial element);
/// * backward: `w_i` on `(t_i, t_{i+1}]`, and `w_0` at `t = 0`;
/// * linear: the continuous piecewise-linear interpolant.
///
/// ```
/// use kwcopt::numerics::{time_interpolate, Interpolant, TimeGrid, Trajectory};
/// use nalgebra::DVector;
/// let tg = TimeGrid::new(1.0, 1.0).unwrap();
/// let w = Trajectory::new(tg, vec![DVector::from_element(1, 0.0), DVector::from_element(1, 1.0)]).unwrap();
/// assert_eq!(time_interpolate(&w, Interpolant::Forward, 0.7).unwrap()[0], 1.0);
/// assert_eq!(time_interpolate(&w, Interpolant::Backward, 0.7).unwrap()[0], 0.0);
/// assert_eq!(time_interpolate(&w, Interpolant::Linear, 0.5).unwrap()[0], 0.5);
/// ```
pub fn time_interpolate(w: &Trajectory, kind: Interpolant, t: f64) -> Result<DVector<f64>> {
    let tg = w.time();
    if !(0.0..=tg.horizon()).contains(&t) {
        return Err(Error::TimeOutOfRange {
            t,
            horizon: tg.horizon(),
        });
    }
    if t == 0.0 {
        return Ok(w[0].clone());
    }
    let n = tg.steps();
    // Index i with t ∈ (t_{i−1}, t_i].
    let mut i = ((t / tg.tau()).ceil() as usize).clamp(1, n);
    while i > 1 && t <= tg.t(i - 1) {
        i -= 1;
    }
    while i < n && t > tg.t(i) {
        i += 1;
    }
    Ok(match kind {
        Interpolant::Forward => w[i].clone(),
        Interpolant::Backward => w[i - 1].clone(),
        Interpolant::Linear => {
            if t == tg.t(i) {
                w[i].clone()
            } else {
                let s = (t - tg.t(i - 1)) / tg.tau();
                &w[i - 1] * (1.0 - s) + &w[i] * s
            }
        }
    })
}
