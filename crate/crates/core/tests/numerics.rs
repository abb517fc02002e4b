use approx::assert_abs_diff_eq;
use kwcopt::numerics::*;
use nalgebra::{DMatrix, DVector, SymmetricEigen, Vector2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ops(dim: usize, n: usize) -> DiscreteOperators {
    let res = vec![n; dim];
    let ext = vec![1.0; dim];
    assemble_operators(&build_grid(dim, &res, &ext).unwrap()).unwrap()
}

#[test]
fn grid_examples() {
    let g = build_grid(1, &[3], &[1.0]).unwrap();
    let xs: Vec<f64> = g.coords().iter().map(|c| c[0]).collect();
    assert_eq!(xs, [0.0, 0.5, 1.0]);
    assert!(g.elements().iter().all(|e| e.measure == 0.5));

    let g = build_grid(2, &[2, 2], &[1.0, 1.0]).unwrap();
    assert_eq!(g.node_count(), 4);
    assert_eq!(g.elements().len(), 2);
    let area: f64 = g.elements().iter().map(|e| e.measure).sum();
    assert_abs_diff_eq!(area, 1.0, epsilon = 1e-15);

    assert!(build_grid(1, &[1], &[1.0]).is_err());
}

#[test]
fn operator_examples() {
    let o = ops(1, 17);
    let one = DVector::from_element(17, 1.0);
    assert!(o.stiffness().mul_vec(&one).amax() < 1e-12);
    let total: f64 = o.mass().triplets().map(|(_, _, v)| v).sum();
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    // ∫|x′|² = 1 on (0, 1).
    let x = o.grid().sample(|p| p[0]);
    assert_abs_diff_eq!(o.stiffness().quad(&x), 1.0, epsilon = 1e-12);
}

#[test]
fn mass_and_stiffness_structure_on_every_grid() {
    for (dim, n) in [(1, 2), (1, 9), (1, 33), (2, 2), (2, 5), (2, 9)] {
        let o = ops(dim, n);
        assert!(o.mass().asymmetry() < 1e-15);
        assert!(o.stiffness().asymmetry() < 1e-15);
        let eig = SymmetricEigen::new(o.mass().to_dense()).eigenvalues;
        assert!(eig.min() > 0.0, "{dim}D {n}: mass not positive definite");
        let one = DVector::from_element(o.nodes(), 1.0);
        assert!(o.stiffness().mul_vec(&one).amax() < 1e-12);
    }
}

#[test]
fn norm_examples() {
    let o = ops(1, 9);
    let zero = DVector::zeros(9);
    assert_eq!((o.norm_h(&zero), o.norm_v(&zero), o.vstar_norm_sq(&zero)), (0.0, 0.0, 0.0));
    let one = DVector::from_element(9, 1.0);
    assert_abs_diff_eq!(o.norm_h(&one), 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(o.norm_v(&one), 1.0, epsilon = 1e-14);
}

/// Dense oracle for `|w|_{V*}`: `sup (w, φ)_H / |φ|_V` over the P1 space is
/// `√(bᵀ(M+K)⁻¹b)` with `b = Mw`, computed here by eigendecomposition.
fn vstar_dense(o: &DiscreteOperators, w: &DVector<f64>) -> f64 {
    let r = o.mass().to_dense() + o.stiffness().to_dense();
    let e = SymmetricEigen::new(r);
    let b = o.mass().mul_vec(w);
    let c = e.eigenvectors.transpose() * b;
    c.iter().zip(e.eigenvalues.iter()).map(|(c, l)| c * c / l).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn norm_ordering(seed in any::<u64>(), dim in 1usize..=2) {
        let o = if dim == 1 { ops(1, 16) } else { ops(2, 4) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = DVector::from_fn(o.nodes(), |_, _| rng.gen_range(-1.0..1.0));
        let vs = o.vstar_norm_sq(&w).sqrt();
        prop_assert!((vs - vstar_dense(&o, &w)).abs() <= 1e-10 * (1.0 + vs));
        prop_assert!(vs <= o.norm_h(&w) * (1.0 + 1e-12));
        prop_assert!(o.norm_h(&w) <= o.norm_v(&w) * (1.0 + 1e-12));
    }

    #[test]
    fn transport_is_convection_transpose(seed in any::<u64>(), dim in 1usize..=2) {
        let o = if dim == 1 { ops(1, 12) } else { ops(2, 5) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: VectorField = o
            .grid()
            .elements()
            .iter()
            .map(|_| Vector2::new(rng.gen_range(-2.0..2.0), if dim == 2 { rng.gen_range(-2.0..2.0) } else { 0.0 }))
            .collect();
        let c = o.convection(&w).to_dense();
        let t = o.transport(&w).to_dense();
        prop_assert!((t - c.transpose()).amax() <= 1e-14);
    }

    #[test]
    fn interpolants_hit_node_values(seed in any::<u64>(), steps in 1usize..12) {
        let tg = TimeGrid::new(1.0, 1.0 / steps as f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Trajectory::from_fn(tg, |_| DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0)));
        for i in 0..=tg.steps() {
            let t = tg.t(i);
            prop_assert_eq!(time_interpolate(&w, Interpolant::Forward, t).unwrap(), w[i].clone());
            prop_assert_eq!(time_interpolate(&w, Interpolant::Linear, t).unwrap(), w[i].clone());
            let back = if i == 0 { 0 } else { i - 1 };
            prop_assert_eq!(time_interpolate(&w, Interpolant::Backward, t).unwrap(), w[back].clone());
        }
    }
}

#[test]
fn interpolation_examples() {
    let tg = TimeGrid::new(1.0, 1.0).unwrap();
    let w = Trajectory::new(tg, vec![DVector::from_element(1, 0.0), DVector::from_element(1, 1.0)]).unwrap();
    assert_eq!(time_interpolate(&w, Interpolant::Forward, 0.7).unwrap()[0], 1.0);
    assert_eq!(time_interpolate(&w, Interpolant::Backward, 0.7).unwrap()[0], 0.0);
    assert_eq!(time_interpolate(&w, Interpolant::Linear, 0.5).unwrap()[0], 0.5);
    assert!(time_interpolate(&w, Interpolant::Linear, 1.5).is_err());
}

#[test]
fn time_norm_of_identity_converges_at_first_order() {
    let o = ops(1, 3);
    let err = |tau: f64| {
        let tg = TimeGrid::new(1.0, tau).unwrap();
        let w = Trajectory::from_fn(tg, |i| DVector::from_element(3, tg.t(i)));
        (traj_h_sq(&o, &w, TimeRule::Forward) - 1.0 / 3.0).abs()
    };
    let (e1, e2) = (err(0.01), err(0.005));
    assert!(e1 < 0.01);
    assert!(((e1 / e2).log2() - 1.0).abs() < 0.05, "order {}", (e1 / e2).log2());
}

#[test]
fn sparse_solve_examples() {
    let id = CsrMatrix::identity(5);
    let b = DVector::from_vec(vec![1.0, -2.0, 3.0, 0.5, 0.0]);
    assert_eq!(solve_sparse(&id, &b).unwrap(), b);

    let o = ops(1, 9);
    let one = DVector::from_element(9, 1.0);
    let x = solve_sparse(o.mass(), &o.mass().mul_vec(&one)).unwrap();
    assert!((x - one).amax() < 1e-13);
}

#[test]
fn banded_solve_matches_dense_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let b = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
        let spd = &b * b.transpose() + DMatrix::identity(8, 8);
        let trip = (0..8).flat_map(|i| (0..8).map(move |j| (i, j))).map(|(i, j)| (i, j, spd[(i, j)])).collect();
        let a = CsrMatrix::from_triplets(8, 8, trip);
        let rhs = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0));
        let x = solve_sparse(&a, &rhs).unwrap();
        let oracle = spd.try_inverse().unwrap() * &rhs;
        assert!((x - oracle).amax() <= 1e-10);
    }
}

#[test]
fn time_grid_rejects_bad_steps() {
    assert!(TimeGrid::new(1.0, 0.0).is_err());
    assert!(TimeGrid::new(1.0, -0.1).is_err());
    assert!(TimeGrid::new(0.0, 0.1).is_err());
}
