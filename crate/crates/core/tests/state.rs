use std::sync::Arc;

use approx::assert_abs_diff_eq;
use kwcopt::experiments::{reference_instance, stationary_instance};
use kwcopt::kernel::NonlinearityBundle;
use kwcopt::numerics::{assemble_operators, build_grid, DiscreteOperators, TimeGrid, Trajectory};
use kwcopt::state::*;
use nalgebra::DVector;
use proptest::prelude::*;

fn ops1(n: usize) -> Arc<DiscreteOperators> {
    Arc::new(assemble_operators(&build_grid(1, &[n], &[1.0]).unwrap()).unwrap())
}

fn smooth_instance(ops: Arc<DiscreteOperators>, tau: f64, horizon: f64, params: ProblemParams) -> StateInstance {
    let time = TimeGrid::new(horizon, tau).unwrap();
    let g = ops.grid().clone();
    let n = ops.nodes();
    StateInstance {
        ops,
        time,
        params: ProblemParams { horizon, ..params },
        bundle: NonlinearityBundle::default_with(1.0),
        eta0: g.sample(|x| 0.5 + 0.2 * (3.0 * x[0]).cos() + if x.len() > 1 { 0.1 * x[1] } else { 0.0 }),
        theta0: g.sample(|x| x[0] * (1.0 - x[0]) + if x.len() > 1 { 0.2 * x[1] * x[1] } else { 0.0 }),
        eta_ad: DVector::zeros(n),
        theta_ad: DVector::zeros(n),
        u: Trajectory::from_fn(time, |i| g.sample(|x| 0.3 * (x[0] - 0.5) * (1.0 + time.t(i)))),
        v: Trajectory::from_fn(time, |i| g.sample(|x| 0.2 * x[0] * time.t(i))),
    }
}

#[test]
fn one_step_from_a_stationary_point_stays_put() {
    let ops = ops1(17);
    let params = ProblemParams::default();
    let bundle = NonlinearityBundle::default_with(1.0);
    let (c, d) = (0.8, 0.3);
    let u = DVector::from_element(17, (bundle.g(c) + bundle.dalpha(c) * params.eps) / params.l_u);
    let (eta, theta, _) = step_state(
        &DVector::from_element(17, c),
        &DVector::from_element(17, d),
        &u,
        &DVector::zeros(17),
        &params,
        &bundle,
        &ops,
        0.01,
        1,
    )
    .unwrap();
    assert!(eta.add_scalar(-c).amax() <= 1e-12);
    assert!(theta.add_scalar(-d).amax() <= 1e-12);
}

#[test]
fn stationary_trajectory_and_energy_are_constant() {
    for ops in [ops1(33), Arc::new(assemble_operators(&build_grid(2, &[7, 7], &[1.0, 1.0]).unwrap()).unwrap())] {
        let inst = stationary_instance(ops, 0.02, 0.8, 0.3).unwrap();
        let st = solve_state(&inst).unwrap();
        for (e, t) in st.eta.frames().iter().zip(st.theta.frames()) {
            assert!(e.add_scalar(-0.8).amax() <= 1e-10);
            assert!(t.add_scalar(-0.3).amax() <= 1e-10);
        }
        assert!(st.energy.iter().all(|e| (e - st.energy[0]).abs() <= 1e-12));
    }
}

#[test]
fn negative_potential_slope_pushes_eta_up() {
    let ops = ops1(17);
    let bundle = NonlinearityBundle::default_with(1.0);
    assert_eq!(bundle.g(0.0), -1.0);
    let tau = 1e-6;
    let zero = DVector::zeros(17);
    let (eta, _, _) = step_state(&zero, &zero, &zero, &zero, &ProblemParams::default(), &bundle, &ops, tau, 1).unwrap();
    // Explicit Euler from rest: η₁ = −τ g(0) at every node.
    assert!(eta.iter().all(|&v| v > 0.0));
    assert!(eta.iter().all(|&v| (v - tau).abs() <= 1e-5 * tau));
}

#[test]
fn pseudo_parabolic_damping_slows_the_first_step() {
    let ops = ops1(33);
    let bundle = NonlinearityBundle::default_with(1.0);
    let eta0 = ops.grid().sample(|x| 0.5 + 0.25 * (2.0 * std::f64::consts::PI * x[0]).sin());
    let theta0 = ops.grid().sample(|x| x[0] * (1.0 - x[0]));
    let zero = DVector::zeros(33);
    let mut prev = f64::INFINITY;
    for mu in [1.0, 10.0, 100.0] {
        let params = ProblemParams { mu, ..ProblemParams::default() };
        let (eta, _, _) = step_state(&eta0, &theta0, &zero, &zero, &params, &bundle, &ops, 0.01, 1).unwrap();
        let change = ops.norm_v(&(&eta - &eta0));
        assert!(change < prev, "μ = {mu}: {change} ≥ {prev}");
        prev = change;
    }
}

#[test]
fn initial_data_are_reproduced_exactly() {
    let inst = smooth_instance(ops1(17), 0.01, 0.1, ProblemParams::default());
    let st = solve_state(&inst).unwrap();
    assert_eq!(st.eta[0], inst.eta0);
    assert_eq!(st.theta[0], inst.theta0);
}

#[test]
fn reference_energy_decreases() {
    let inst = reference_instance(65, 1e-3).unwrap();
    let st = solve_state(&inst.state).unwrap();
    let f0 = st.energy[0];
    for w in st.energy.windows(2) {
        assert!(w[1] <= w[0] + 1e-8 * (1.0 + f0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn uncontrolled_energy_decreases_in_2d(a in -0.3..0.3f64, b in 0.0..0.5f64, k in 1.0..4.0f64) {
        let ops = Arc::new(assemble_operators(&build_grid(2, &[7, 7], &[1.0, 1.0]).unwrap()).unwrap());
        let g = ops.grid().clone();
        let mut inst = smooth_instance(ops, 0.01, 0.2, ProblemParams::default());
        inst.eta0 = g.sample(|x| 0.5 + a * (k * x[0]).sin() * x[1]);
        inst.theta0 = g.sample(|x| b * (k * x[1]).cos() + x[0]);
        inst.u = Trajectory::zeros(inst.time, g.node_count());
        inst.v = Trajectory::zeros(inst.time, g.node_count());
        let st = solve_state(&inst).unwrap();
        let f0 = st.energy[0];
        for w in st.energy.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-8 * (1.0 + f0));
        }
    }
}

#[test]
fn larger_regularization_never_lowers_the_energy_trace() {
    let inst = smooth_instance(ops1(33), 0.01, 0.2, ProblemParams::default());
    let st = solve_state(&inst).unwrap();
    let low = energy_trace(&inst.ops, &st.eta, &st.theta, &ProblemParams { eps: 0.2, ..inst.params }, &inst.bundle);
    let high = energy_trace(&inst.ops, &st.eta, &st.theta, &ProblemParams { eps: 0.7, ..inst.params }, &inst.bundle);
    assert!(low.iter().zip(&high).all(|(l, h)| h >= l));
}

#[test]
fn solution_is_lipschitz_in_the_initial_data() {
    let base = smooth_instance(ops1(33), 0.01, 0.5, ProblemParams::default());
    let ref_st = solve_state(&base).unwrap();
    let bump = base.ops.grid().sample(|x| (-(x[0] - 0.4).powi(2) / 0.02).exp());
    let consts: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&delta| {
            let inst = StateInstance {
                eta0: &base.eta0 + &bump * delta,
                ..base.clone()
            };
            let st = solve_state(&inst).unwrap();
            st.eta
                .frames()
                .iter()
                .zip(ref_st.eta.frames())
                .map(|(a, b)| base.ops.norm_h(&(a - b)))
                .fold(0.0, f64::max)
                / delta
        })
        .collect();
    let (lo, hi) = consts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), c| (l.min(*c), h.max(*c)));
    assert!(hi <= 1.1 * lo, "Lipschitz ratios {consts:?}");
    assert!(hi < 10.0);
}

#[test]
fn time_refinement_converges_at_first_order() {
    let finals: Vec<(DVector<f64>, DVector<f64>)> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&tau| {
            let st = solve_state(&smooth_instance(ops1(33), tau, 0.4, ProblemParams::default())).unwrap();
            (st.eta.last().clone(), st.theta.last().clone())
        })
        .collect();
    let ops = ops1(33);
    let diff = |a: &(DVector<f64>, DVector<f64>), b: &(DVector<f64>, DVector<f64>)| {
        (ops.norm_h_sq(&(&a.0 - &b.0)) + ops.norm_h_sq(&(&a.1 - &b.1))).sqrt()
    };
    let (e1, e2) = (diff(&finals[0], &finals[1]), diff(&finals[1], &finals[2]));
    let order = (e1 / e2).log2();
    assert!(order >= 0.9, "observed order {order}");
}

#[test]
fn coupling_condition_is_enforced() {
    assert!(ProblemParams { l_u: 0.0, ..ProblemParams::default() }.validate().is_err());
    assert!(ProblemParams { m_v: 0.0, ..ProblemParams::default() }.validate().is_err());
    ProblemParams { l_u: 0.0, m_u: 0.0, ..ProblemParams::default() }.validate().unwrap();
    assert!(ProblemParams { mu: 0.0, ..ProblemParams::default() }.validate().is_err());
    assert!(ProblemParams { eps: -1.0, ..ProblemParams::default() }.validate().is_err());
}

#[test]
fn zero_regularization_is_refused_by_the_stepper() {
    let ops = ops1(5);
    let z = DVector::zeros(5);
    let params = ProblemParams { eps: 0.0, ..ProblemParams::default() };
    let r = step_state(&z, &z, &z, &z, &params, &NonlinearityBundle::default_with(1.0), &ops, 0.1, 1);
    assert!(r.is_err());
    assert_abs_diff_eq!(params.coercivity(0.5), 0.5);
}
