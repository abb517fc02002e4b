use std::sync::Arc;

use approx::assert_abs_diff_eq;
use kwcopt::kernel::*;
use kwcopt::numerics::{assemble_operators, build_grid, traj_h_sq, traj_inner, TimeGrid, TimeRule, Trajectory};
use nalgebra::{DVector, SymmetricEigen};
use proptest::prelude::*;

fn vec2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, 1..=2)
}

#[test]
fn gamma_examples() {
    assert_eq!(gamma_eps(1.0, &[0.0, 0.0]), 1.0);
    assert_eq!(gamma_eps(0.0, &[3.0, 4.0]), 5.0);
    assert_eq!((gamma_eps(0.5, &[0.0, 0.0]) - gamma_eps(0.0, &[0.0, 0.0])).abs(), 0.5);
}

#[test]
fn gradient_examples() {
    let g = grad_gamma_eps(1.0, &[1.0, 0.0]).unwrap();
    assert_abs_diff_eq!(g[0], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
    assert_eq!(g[1], 0.0);
    assert_eq!(grad_gamma_eps(0.3, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    assert!(grad_gamma_eps(0.0, &[1.0]).is_err());
}

#[test]
fn hessian_examples() {
    let eps = 0.25;
    let h = hess_gamma_eps(eps, &[0.0, 0.0]).unwrap();
    assert_abs_diff_eq!(h[(0, 0)], 1.0 / eps, epsilon = 1e-14);
    assert_abs_diff_eq!(h[(1, 1)], 1.0 / eps, epsilon = 1e-14);
    assert_eq!(h[(0, 1)], 0.0);

    let mut ev: Vec<f64> = SymmetricEigen::new(hess_gamma_eps(1.0, &[1.0, 0.0]).unwrap())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    assert_abs_diff_eq!(ev[0], 2f64.powf(-1.5), epsilon = 1e-15);
    assert_abs_diff_eq!(ev[1], 2f64.powf(-0.5), epsilon = 1e-15);
}

#[test]
fn sgr_examples() {
    assert_eq!(sgr(&[3.0, 4.0]), Sgr::Unit(vec![0.6, 0.8]));
    let ball = sgr(&[0.0, 0.0]);
    assert_eq!(ball, Sgr::Ball);
    assert!(ball.contains(&[0.5, 0.0], 0.0));
    assert!(!ball.contains(&[1.5, 0.0], 0.0));
}

proptest! {
    #[test]
    fn gradient_matches_central_differences(eps in 0.05..5.0f64, y in vec2()) {
        let g = grad_gamma_eps(eps, &y).unwrap();
        let h = 1e-6 * (1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        for d in 0..y.len() {
            let (mut p, mut m) = (y.clone(), y.clone());
            p[d] += h;
            m[d] -= h;
            let fd = (gamma_eps(eps, &p) - gamma_eps(eps, &m)) / (2.0 * h);
            prop_assert!((fd - g[d]).abs() <= 1e-6);
        }
    }

    #[test]
    fn hessian_matches_differences_of_gradient(eps in 0.2..5.0f64, y in prop::collection::vec(-5.0..5.0f64, 1..=2)) {
        let hs = hess_gamma_eps(eps, &y).unwrap();
        let h = 1e-6;
        for d in 0..y.len() {
            let (mut p, mut m) = (y.clone(), y.clone());
            p[d] += h;
            m[d] -= h;
            let (gp, gm) = (grad_gamma_eps(eps, &p).unwrap(), grad_gamma_eps(eps, &m).unwrap());
            for r in 0..y.len() {
                prop_assert!(((gp[r] - gm[r]) / (2.0 * h) - hs[(r, d)]).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn kernel_bounds(eps in 1e-3..10.0f64, y in vec2()) {
        let g = grad_gamma_eps(eps, &y).unwrap();
        prop_assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1.0 + 1e-15);
        let h = hess_gamma_eps(eps, &y).unwrap();
        prop_assert!(h.amax() <= (1.0 + 1e-14) / eps);
        let gap = gamma_eps(eps, &y) - gamma_eps(0.0, &y);
        prop_assert!(gap >= -1e-12 && gap <= eps * (1.0 + 1e-14));
    }

    #[test]
    fn gradient_approaches_unit_direction(eps in 1e-4..1.0f64, y in vec2()) {
        let r = gamma_eps(0.0, &y);
        prop_assume!(r > 1e-3);
        let g = grad_gamma_eps(eps, &y).unwrap();
        let err = g.iter().zip(&y).map(|(a, b)| (a - b / r).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= eps / r * (1.0 + 1e-12));
    }

    #[test]
    fn convexity_midpoint(eps in 0.0..3.0f64, a in prop::collection::vec(-10.0..10.0f64, 2), b in prop::collection::vec(-10.0..10.0f64, 2)) {
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        prop_assert!(gamma_eps(eps, &mid) <= 0.5 * (gamma_eps(eps, &a) + gamma_eps(eps, &b)) + 1e-12);
    }
}

fn box_setup() -> (Arc<kwcopt::numerics::DiscreteOperators>, TimeGrid, BoxConstraint) {
    let ops = Arc::new(assemble_operators(&build_grid(1, &[6], &[1.0]).unwrap()).unwrap());
    let tg = TimeGrid::new(1.0, 0.25).unwrap();
    let lo = Trajectory::from_fn(tg, |i| DVector::from_fn(6, |j, _| -1.0 + 0.1 * (i + j) as f64));
    let hi = lo.map(|f| f.add_scalar(0.7));
    (ops, tg, BoxConstraint::new(lo, hi).unwrap())
}

fn traj(tg: TimeGrid, vals: Vec<f64>) -> Trajectory {
    Trajectory::from_fn(tg, |i| DVector::from_row_slice(&vals[6 * i..6 * i + 6]))
}

#[test]
fn projection_examples() {
    let tg = TimeGrid::new(1.0, 1.0).unwrap();
    let k = BoxConstraint::constant(tg, 3, -1.0, 1.0).unwrap();
    let u = Trajectory::constant(tg, DVector::from_vec(vec![2.0, 0.5, -3.0]));
    let p = project_box(&k, &u).unwrap();
    for f in p.frames() {
        assert_eq!(f.as_slice(), &[1.0, 0.5, -1.0]);
    }
    assert!(k.contains(&p));
    assert!(BoxConstraint::constant(tg, 3, 1.0, -1.0).is_err());
}

proptest! {
    #[test]
    fn projection_characterization(w in prop::collection::vec(-3.0..3.0f64, 30), s in prop::collection::vec(0.0..1.0f64, 30)) {
        let (ops, tg, k) = box_setup();
        let w = traj(tg, w);
        let pw = project_box(&k, &w).unwrap();
        // z = lo + s(hi − lo) ranges over the box.
        let z = Trajectory::from_fn(tg, |i| {
            DVector::from_fn(6, |j, _| k.lower()[i][j] + s[6 * i + j] * (k.upper()[i][j] - k.lower()[i][j]))
        });
        let lhs = traj_inner(&ops, &w.axpy(-1.0, &pw), &z.axpy(-1.0, &pw), TimeRule::Forward);
        prop_assert!(lhs <= 1e-12);
    }

    #[test]
    fn projection_nonexpansive(a in prop::collection::vec(-3.0..3.0f64, 30), b in prop::collection::vec(-3.0..3.0f64, 30)) {
        let (ops, tg, k) = box_setup();
        let (a, b) = (traj(tg, a), traj(tg, b));
        let d = project_box(&k, &a).unwrap().axpy(-1.0, &project_box(&k, &b).unwrap());
        for rule in [TimeRule::Forward, TimeRule::Backward] {
            prop_assert!(traj_h_sq(&ops, &d, rule) <= traj_h_sq(&ops, &a.axpy(-1.0, &b), rule) + 1e-15);
        }
    }
}

#[test]
fn energy_examples() {
    let ops = assemble_operators(&build_grid(1, &[33], &[1.0]).unwrap()).unwrap();
    let bundle = NonlinearityBundle::default_with(1.0);
    let one = DVector::from_element(33, 1.0);
    let c = DVector::from_element(33, 0.4);
    assert_abs_diff_eq!(kwc_energy(&ops, 0.5, &bundle, &one, &c), 1.0, epsilon = 1e-14);
    assert_eq!(kwc_energy(&ops, 0.0, &bundle, &one, &c), 0.0);

    let zero = Arc::new(|_: f64| 0.0);
    let flat = CustomFns {
        g: zero.clone(),
        dg: zero.clone(),
        big_g: zero.clone(),
        alpha0: Arc::new(|_| 1.0),
        dalpha0: zero.clone(),
        alpha: Arc::new(|_| 1.0),
        dalpha: zero.clone(),
        ddalpha: zero,
    };
    let x = ops.grid().sample(|p| p[0]);
    let e = kwc_energy(&ops, 0.0, &NonlinearityBundle::custom(flat, 1.0), &x, &c);
    assert_abs_diff_eq!(e, 0.5, epsilon = 1e-13);
}

#[test]
fn energy_grows_with_regularization() {
    let ops = assemble_operators(&build_grid(2, &[9, 9], &[1.0, 1.0]).unwrap()).unwrap();
    let bundle = NonlinearityBundle::default_with(1.0);
    let eta = ops.grid().sample(|p| 0.3 + p[0] * p[1]);
    let theta = ops.grid().sample(|p| (3.0 * p[0]).sin() * p[1]);
    let mut prev = f64::NEG_INFINITY;
    for eps in [0.0, 0.1, 0.5, 1.0, 2.0] {
        let f = kwc_energy(&ops, eps, &bundle, &eta, &theta);
        assert!(f >= prev);
        prev = f;
    }
}

#[test]
fn default_bundle_passes_validation_and_tables_follow_it() {
    let b = NonlinearityBundle::default_with(1.0);
    b.validate(-3.0, 3.0, 61).unwrap();
    assert!(NonlinearityBundle::default_with(0.0).validate(-1.0, 1.0, 5).is_err());

    let x: Vec<f64> = (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect();
    let col = |f: &dyn Fn(f64) -> f64| x.iter().map(|&v| f(v)).collect::<Vec<_>>();
    let table = BundleTable {
        g: col(&|v| b.g(v)),
        dg: col(&|v| b.dg(v)),
        big_g: col(&|v| b.G(v)),
        alpha0: col(&|v| b.alpha0(v)),
        dalpha0: col(&|v| b.dalpha0(v)),
        alpha: col(&|v| b.alpha(v)),
        dalpha: col(&|v| b.dalpha(v)),
        ddalpha: col(&|v| b.ddalpha(v)),
        x: x.clone(),
    };
    let t = NonlinearityBundle::tabulated(table, 1.0).unwrap();
    for v in [-1.95, -0.33, 0.0, 0.41, 1.7] {
        assert_abs_diff_eq!(t.alpha(v), b.alpha(v), epsilon = 1e-12);
        assert_abs_diff_eq!(t.G(v), b.G(v), epsilon = 1e-12);
    }
    t.validate(-2.0, 2.0, 41).unwrap();
}
