//! Seeded random class-𝒮 septuplets and linear problems.

use nalgebra::{DVector, Matrix2, Vector2};
use rand::Rng;

use crate::error::Result;
use crate::linear::{tau1, tau2, validate_septuplet, LinearProblem, Septuplet, SeptupletData};
use crate::numerics::{DiscreteOperators, TimeGrid, Trajectory};
use crate::state::ProblemParams;

/// Coefficients affine in time, `c(t) = c₀ + t·c₁`, so they can be
/// resampled on any time grid.
#[derive(Debug, Clone)]
pub struct RandomCoefficients {
    pub delta_a: f64,
    a: [DVector<f64>; 2],
    scalars: [[DVector<f64>; 2]; 4],
    omega: [Vec<Vector2<f64>>; 2],
    big_a: [Vec<Matrix2<f64>>; 2],
}

fn field(rng: &mut impl Rng, n: usize, s: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-s..=s))
}

fn psd(rng: &mut impl Rng, s: f64, dim: usize) -> Matrix2<f64> {
    let b = Matrix2::from_fn(|_, _| rng.gen_range(-1.0..=1.0));
    let mut m = b.transpose() * b * (0.5 * s);
    if dim == 1 {
        m[(0, 1)] = 0.0;
        m[(1, 0)] = 0.0;
        m[(1, 1)] = 0.0;
    }
    m
}

impl RandomCoefficients {
    /// Draws coefficients of magnitude about `scale` on the grid of `ops`.
    pub fn draw(rng: &mut impl Rng, ops: &DiscreteOperators, scale: f64) -> Self {
        let n = ops.nodes();
        let ne = ops.grid().elements().len();
        let dim = ops.grid().dim();
        let delta_a = rng.gen_range(0.5..=1.5);
        let slope_a = field(rng, n, 0.5 * scale).map(f64::abs);
        let a0 = DVector::from_fn(n, |_, _| delta_a + rng.gen_range(0.0..=scale));
        let mut pair = |s: f64| [field(rng, n, s), field(rng, n, 0.5 * s)];
        let scalars = [pair(scale), pair(scale), pair(scale), pair(scale)];
        let mut vecs = |s: f64| -> Vec<Vector2<f64>> {
            (0..ne)
                .map(|_| {
                    let y = if dim == 1 { 0.0 } else { rng.gen_range(-s..=s) };
                    Vector2::new(rng.gen_range(-s..=s), y)
                })
                .collect()
        };
        let omega = [vecs(scale), vecs(0.5 * scale)];
        let big_a = [
            (0..ne).map(|_| psd(rng, scale, dim)).collect(),
            (0..ne).map(|_| psd(rng, 0.5 * scale, dim)).collect(),
        ];
        RandomCoefficients {
            delta_a,
            a: [a0, slope_a],
            scalars,
            omega,
            big_a,
        }
    }

    /// Samples the coefficients at the nodes of `time`.
    pub fn sample(&self, ops: &DiscreteOperators, time: TimeGrid) -> Result<Septuplet> {
        let s = |k: usize| Trajectory::from_fn(time, |i| &self.scalars[k][0] + &self.scalars[k][1] * time.t(i));
        let data = SeptupletData {
            a: Trajectory::from_fn(time, |i| &self.a[0] + &self.a[1] * time.t(i)),
            b: s(0),
            c: s(1),
            lambda: s(2),
            xi: s(3),
            omega: Trajectory::from_fn(time, |i| {
                self.omega[0].iter().zip(&self.omega[1]).map(|(a, b)| a + b * time.t(i)).collect()
            }),
            big_a: Trajectory::from_fn(time, |i| {
                self.big_a[0].iter().zip(&self.big_a[1]).map(|(a, b)| a + b * time.t(i)).collect()
            }),
            delta_a: self.delta_a,
        };
        validate_septuplet(data, ops)
    }

    /// A step `τ` with `τ / bound(sep(τ)) = ratio`, found by fixed-point
    /// iteration (the norms depend weakly on `τ` through the sampling).
    pub fn step_at(
        &self,
        ops: &DiscreteOperators,
        params: &ProblemParams,
        ratio: f64,
        bound: fn(&Septuplet, &ProblemParams) -> f64,
    ) -> Result<(f64, Septuplet)> {
        let mut tau = 0.01 * params.horizon;
        let mut sep = self.sample(ops, TimeGrid::new(params.horizon, tau)?)?;
        for _ in 0..20 {
            let next = ratio * bound(&sep, params);
            let done = (next - tau).abs() <= 1e-12 * tau;
            tau = next;
            sep = self.sample(ops, TimeGrid::new(params.horizon, tau)?)?;
            if done {
                break;
            }
        }
        Ok((tau, sep))
    }

    pub fn at_tau1_ratio(&self, ops: &DiscreteOperators, params: &ProblemParams, ratio: f64) -> Result<(f64, Septuplet)> {
        self.step_at(ops, params, ratio, tau1)
    }

    pub fn at_tau2_ratio(&self, ops: &DiscreteOperators, params: &ProblemParams, ratio: f64) -> Result<(f64, Septuplet)> {
        self.step_at(ops, params, ratio, tau2)
    }
}

/// A linear problem on `sep` with random initial data and smooth-in-time
/// random forcings.
pub fn random_problem(rng: &mut impl Rng, sep: Septuplet, ops: &DiscreteOperators) -> LinearProblem {
    let n = ops.nodes();
    let tg = *sep.time();
    let (h0, h1, k0, k1) = (field(rng, n, 1.0), field(rng, n, 1.0), field(rng, n, 1.0), field(rng, n, 1.0));
    LinearProblem {
        p0: field(rng, n, 1.0),
        z0: field(rng, n, 1.0),
        h: Trajectory::from_fn(tg, |i| &h0 + &h1 * (3.0 * tg.t(i)).sin()),
        k: Trajectory::from_fn(tg, |i| &k0 + &k1 * (2.0 * tg.t(i)).cos()),
        sep,
    }
}
