use std::sync::Arc;

use approx::assert_abs_diff_eq;
use kwcopt::experiments::{random_problem, RandomCoefficients};
use kwcopt::linear::*;
use kwcopt::numerics::*;
use kwcopt::state::ProblemParams;
use kwcopt::Error;
use nalgebra::{DVector, Matrix2, Vector2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ops(dim: usize, n: usize) -> Arc<DiscreteOperators> {
    Arc::new(assemble_operators(&build_grid(dim, &vec![n; dim], &vec![1.0; dim]).unwrap()).unwrap())
}

fn unit_params() -> ProblemParams {
    ProblemParams {
        c_emb: 1.0,
        ..ProblemParams::default()
    }
}

fn identity(o: &DiscreteOperators, tau: f64) -> SeptupletData {
    SeptupletData::identity(o, TimeGrid::new(1.0, tau).unwrap())
}

#[test]
fn septuplet_validation_examples() {
    let o = ops(2, 4);
    validate_septuplet(identity(&o, 0.1), &o).unwrap();

    let mut d = identity(&o, 0.1);
    d.a = d.a.map(|f| f.map(|_| 0.5));
    assert!(matches!(validate_septuplet(d, &o), Err(Error::Septuplet(_))));

    let mut d = identity(&o, 0.1);
    d.big_a.frames_mut()[1][3] = Matrix2::new(1.0, 1e-3, 0.0, 1.0);
    assert!(matches!(validate_septuplet(d, &o), Err(Error::Septuplet(_))));

    let mut d = identity(&o, 0.1);
    d.big_a.frames_mut()[0][0] = Matrix2::new(1.0, 0.0, 0.0, -0.5);
    assert!(validate_septuplet(d, &o).is_err());
}

#[test]
fn step_bound_examples() {
    let o = ops(1, 9);
    let p = unit_params();
    let sep = validate_septuplet(identity(&o, 0.01), &o).unwrap();
    assert_eq!(tau1(&sep, &p), 1.0 / 16.0);
    assert_eq!(tau2(&sep, &p), 1.0 / 64.0);

    let mut d = identity(&o, 0.01);
    d.omega = d.omega.map(|f| f.iter().map(|_| Vector2::new(1.0, 0.0)).collect());
    let sep_w = validate_septuplet(d, &o).unwrap();
    assert_eq!(tau1(&sep_w, &p), 1.0 / 32.0);

    let slow = ProblemParams { mu: 0.1, ..p };
    assert_abs_diff_eq!(tau1(&sep, &slow), 0.000625, epsilon = 1e-18);
}

#[test]
fn tau2_shrinks_as_coefficients_grow() {
    let o = ops(1, 9);
    let p = unit_params();
    let mut prev = f64::INFINITY;
    for s in [0.0, 1.0, 10.0, 100.0, 1e4] {
        let mut d = identity(&o, 0.01);
        d.lambda = d.lambda.map(|f| f.map(|_| s));
        d.c = d.c.map(|f| f.map(|_| s));
        let sep = validate_septuplet(d, &o).unwrap();
        let t2 = tau2(&sep, &p);
        assert!(t2 <= tau1(&sep, &p));
        assert!(t2 < prev || s == 0.0);
        prev = t2;
    }
    assert!(prev < 1e-9);
}

#[test]
fn step_guard_rejects_large_steps() {
    let o = ops(1, 9);
    let p = unit_params();
    let z = DVector::zeros(9);
    for tau in [1.0 / 16.0, 0.1, 0.5] {
        let sep = validate_septuplet(identity(&o, tau), &o).unwrap();
        let r = step_linear(&sep, 1, &z, &z, &z, &z, &p, &o);
        assert!(matches!(r, Err(Error::StepTooLarge { .. })), "τ = {tau}");
    }
    let sep = validate_septuplet(identity(&o, 0.06), &o).unwrap();
    step_linear(&sep, 1, &z, &z, &z, &z, &p, &o).unwrap();
}

#[test]
fn zero_data_gives_zero_solution() {
    let o = ops(2, 4);
    let p = unit_params();
    let sep = validate_septuplet(identity(&o, 0.05), &o).unwrap();
    let n = o.nodes();
    let z = DVector::zeros(n);
    assert_eq!(step_linear(&sep, 1, &z, &z, &z, &z, &p, &o).unwrap(), (z.clone(), z.clone()));
    let tg = *sep.time();
    let prob = LinearProblem {
        sep,
        p0: z.clone(),
        z0: z.clone(),
        h: Trajectory::zeros(tg, n),
        k: Trajectory::zeros(tg, n),
    };
    let sol = solve_linear(&prob, &p, &o).unwrap();
    assert_eq!(sol.p.max_abs(), 0.0);
    assert_eq!(sol.z.max_abs(), 0.0);
    let (h, k) = residual_forcing(&prob.sep, &sol, &p, &o);
    assert_eq!((h.max_abs(), k.max_abs()), (0.0, 0.0));
    let rep = stability_check(&prob, &sol, &p, &o);
    assert!(rep.holds());
    assert!(rep.uniform.iter().all(|e| e.lhs == 0.0 && e.rhs >= 0.0));
}

#[test]
fn decoupled_identity_step_matches_scalar_solve() {
    let o = ops(1, 17);
    let p = unit_params();
    let tau = 0.02;
    let sep = validate_septuplet(identity(&o, tau), &o).unwrap();
    let r = o.grid().sample(|x| 1.0 + x[0] * x[0]);
    let z = DVector::zeros(17);
    let (pi, zi) = step_linear(&sep, 1, &z, &z, &r, &z, &p, &o).unwrap();
    let lhs = CsrMatrix::lincomb(&[(1.0 / tau, o.mass()), (p.mu * p.mu / tau, o.stiffness()), (1.0, o.stiffness())]);
    let expect = solve_sparse(&lhs, &o.mass().mul_vec(&r)).unwrap();
    assert!((pi - expect).amax() <= 1e-12);
    assert!(zi.amax() <= 1e-14);
}

/// Residuals of both step equations assembled independently from the
/// public operators, tested against every basis function.
fn step_residual(prob: &LinearProblem, sol: &LinearSolution, i: usize, p: &ProblemParams, o: &DiscreteOperators) -> f64 {
    let s = &prob.sep;
    let tau = s.time().tau();
    let (pi, pm, zi, zm) = (&sol.p[i], &sol.p[i - 1], &sol.z[i], &sol.z[i - 1]);
    let dp = pi - pm;
    let dz = zi - zm;
    let lump = |c: &DVector<f64>, w: &DVector<f64>| c.component_mul(o.lumped()).component_mul(w);
    let rp = (o.mass().mul_vec(&dp) + o.stiffness().mul_vec(&dp) * (p.mu * p.mu)) / tau
        + o.stiffness().mul_vec(pi)
        + lump(&s.lambda[i], pi)
        + o.convection(&s.omega[i]).mul_vec(zi)
        + lump(&s.xi[i], zm)
        - o.mass().mul_vec(&prob.h[i]);
    let rz = (lump(&s.a[i], &dz) + o.stiffness().mul_vec(&dz) * (p.nu * p.nu)) / tau
        + lump(&s.b[i], zi)
        + o.weighted_stiffness(&s.big_a[i]).mul_vec(zi)
        + o.convection(&s.omega[i]).tr_mul_vec(pi)
        + lump(&s.c[i], pm)
        - o.mass().mul_vec(&prob.k[i]);
    rp.amax().max(rz.amax())
}

fn random_case(seed: u64, dim: usize) -> (Arc<DiscreteOperators>, ProblemParams, LinearProblem) {
    let o = if dim == 1 { ops(1, 12) } else { ops(2, 4) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = ProblemParams {
        mu: rng.gen_range(0.7..=1.3),
        nu: rng.gen_range(0.7..=1.3),
        c_emb: 1.0,
        ..ProblemParams::default()
    };
    let scale = rng.gen_range(0.1..=1.0);
    let coeffs = RandomCoefficients::draw(&mut rng, &o, scale);
    let (_, sep) = coeffs.at_tau1_ratio(&o, &p, 0.5).unwrap();
    let prob = random_problem(&mut rng, sep, &o);
    (o, p, prob)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn step_solution_satisfies_the_discrete_equations(seed in any::<u64>(), dim in 1usize..=2) {
        let (o, p, prob) = random_case(seed, dim);
        let sol = solve_linear(&prob, &p, &o).unwrap();
        for i in 1..sol.p.len() {
            let scale = 1.0 + sol.p[i].amax().max(sol.z[i].amax()) / prob.sep.time().tau();
            prop_assert!(step_residual(&prob, &sol, i, &p, &o) <= 1e-10 * scale);
        }
    }

    #[test]
    fn superposition(seed in any::<u64>(), dim in 1usize..=2, alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let (o, p, first) = random_case(seed, dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let second = random_problem(&mut rng, first.sep.clone(), &o);
        let combo = LinearProblem {
            sep: first.sep.clone(),
            p0: &first.p0 * alpha + &second.p0 * beta,
            z0: &first.z0 * alpha + &second.z0 * beta,
            h: first.h.scaled(alpha).axpy(beta, &second.h),
            k: first.k.scaled(alpha).axpy(beta, &second.k),
        };
        let (s1, s2, s3) = (
            solve_linear(&first, &p, &o).unwrap(),
            solve_linear(&second, &p, &o).unwrap(),
            solve_linear(&combo, &p, &o).unwrap(),
        );
        let expect_p = s1.p.scaled(alpha).axpy(beta, &s2.p);
        let expect_z = s1.z.scaled(alpha).axpy(beta, &s2.z);
        let scale = 1.0 + expect_p.max_abs().max(expect_z.max_abs());
        prop_assert!(s3.p.axpy(-1.0, &expect_p).max_abs() <= 1e-10 * scale);
        prop_assert!(s3.z.axpy(-1.0, &expect_z).max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn forcing_round_trip_and_two_sided_bound(seed in any::<u64>(), dim in 1usize..=2) {
        let (o, p, prob) = random_case(seed, dim);
        let sol = solve_linear(&prob, &p, &o).unwrap();
        let (h, k) = residual_forcing(&prob.sep, &sol, &p, &o);
        let scale = prob.h.max_abs().max(prob.k.max_abs());
        for i in 1..h.len() {
            prop_assert!((&h[i] - &prob.h[i]).amax() <= 1e-9 * scale);
            prop_assert!((&k[i] - &prob.k[i]).amax() <= 1e-9 * scale);
        }
        let (m0, m1) = solution_bounds(&prob, &p);
        let (norm, inputs) = (solution_norm(&sol, &o), input_norm(&prob, &o));
        prop_assert!(m0 * inputs <= norm && norm <= m1 * inputs);
    }

    #[test]
    fn guard_rejects_everything_at_or_above_tau1(seed in any::<u64>(), dim in 1usize..=2, ratio in 1.0..3.0f64) {
        let o = if dim == 1 { ops(1, 9) } else { ops(2, 4) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = RandomCoefficients::draw(&mut rng, &o, 0.5);
        let (_, sep) = coeffs.at_tau1_ratio(&o, &unit_params(), ratio).unwrap();
        let z = DVector::zeros(o.nodes());
        let r = step_linear(&sep, 1, &z, &z, &z, &z, &unit_params(), &o);
        let rejected = matches!(r, Err(Error::StepTooLarge { .. }));
        prop_assert!(rejected);
    }
}

#[test]
fn stability_estimates_hold_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for k in 0..50 {
        let o = if k % 2 == 0 { ops(1, 9) } else { ops(2, 4) };
        let p = ProblemParams {
            mu: rng.gen_range(0.7..=1.3),
            nu: rng.gen_range(0.7..=1.3),
            c_emb: 1.0,
            ..ProblemParams::default()
        };
        let scale = rng.gen_range(0.1..=1.0);
        let coeffs = RandomCoefficients::draw(&mut rng, &o, scale);
        let (tau, sep) = coeffs.at_tau2_ratio(&o, &p, 0.9).unwrap();
        assert!(tau < tau2(&sep, &p));
        let prob = random_problem(&mut rng, sep, &o);
        let sol = solve_linear(&prob, &p, &o).unwrap();
        let rep = stability_check(&prob, &sol, &p, &o);
        assert!(rep.holds(), "instance {k}: worst slack {}", rep.worst_slack());
    }
}

#[test]
fn gronwall_examples() {
    let (o, p, first) = random_case(5, 1);
    let s1 = solve_linear(&first, &p, &o).unwrap();
    let same = gronwall_diagnostic((&first, &s1), (&first, &s1), &p, &o);
    assert!(same.trace.iter().all(|e| e.lhs == 0.0 && e.rhs >= 0.0));

    let mut forced = first.clone();
    forced.h = first.h.map(|f| f.add_scalar(0.05));
    let s2 = solve_linear(&forced, &p, &o).unwrap();
    let rep = gronwall_diagnostic((&first, &s1), (&forced, &s2), &p, &o);
    assert_eq!(rep.trace[0].lhs, 0.0);
    assert!(rep.holds());
    assert!(rep.trace.last().unwrap().lhs > 0.0);

    // A perturbed λ alone enters only through the solution-dependent term.
    let mut d = first.sep.data().clone();
    d.lambda = d.lambda.map(|f| f.add_scalar(0.1));
    let shifted = LinearProblem {
        sep: validate_septuplet(d, &o).unwrap(),
        ..first.clone()
    };
    let s3 = solve_linear(&shifted, &p, &o).unwrap();
    let rep = gronwall_diagnostic((&first, &s1), (&shifted, &s3), &p, &o);
    assert!(rep.holds());
    assert!(rep.trace.last().unwrap().rhs > rep.trace[0].rhs);
}

#[test]
fn forcing_averages_integrate_exactly_for_quintics() {
    let o = ops(1, 3);
    let tg = TimeGrid::new(1.0, 0.25).unwrap();
    let f = average_forcing(o.grid(), tg, |t, x| t.powi(5) + x[0]);
    for i in 1..=tg.steps() {
        let (a, b) = (tg.t(i - 1), tg.t(i));
        let exact = (b.powi(6) - a.powi(6)) / 6.0 / tg.tau();
        assert_abs_diff_eq!(f[i][0], exact, epsilon = 1e-14);
    }
    assert_eq!(f[0][2], 1.0);
}
