//! Invariants of the weighted space, the discrete operator and the Fučik
//! energy, checked on random fields.

use std::sync::Arc;

use fucik_core::{
    constrained_grad, inner_product_k, sphere_project, tilde_i_p, x_seminorm_sq, Backend, DiscreteOperator,
    Discretization, FieldSample,
};
use proptest::prelude::*;

fn spectral_op() -> DiscreteOperator {
    DiscreteOperator::assemble(&Discretization::new(1, Backend::Spectral, 32, 12.0).unwrap()).unwrap()
}

fn fd_op() -> DiscreteOperator {
    DiscreteOperator::assemble(&Discretization::finite_difference(801, 12.0, 0.0).unwrap()).unwrap()
}

fn field(op: &DiscreteOperator, coords: &[f64]) -> FieldSample {
    FieldSample::new(op.disc(), op.from_coords(coords)).unwrap()
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

#[test]
fn first_basis_function_is_the_gaussian() {
    let d = Discretization::new(1, Backend::Spectral, 32, 12.0).unwrap();
    let basis = d.basis().unwrap();
    // transformed ground state e^{−x²/8}, normalized on the sample grid
    let g = FieldSample::from_transformed_fn(&d, |x| (-x[0] * x[0] / 8.0).exp());
    let g = g.sphere_project().unwrap();
    let col = basis.matrix.column(0);
    let sign = if col[col.len() / 2] > 0.0 { 1.0 } else { -1.0 };
    let worst = g.values().iter().zip(col.iter()).fold(0.0f64, |m, (a, b)| m.max((a - sign * b).abs()));
    assert!(worst < 1e-8, "first basis column differs from the Gaussian by {worst:e}");
}

#[test]
fn ground_state_identity_on_both_backends() {
    for (op, tol) in [(spectral_op(), 1e-12), (fd_op(), 1e-6)] {
        let es = op.eigensystem(1).unwrap();
        let r = es.max_residual(&op).unwrap();
        assert!(r < tol, "ground-state residual {r:e}");
    }
}

#[test]
fn only_the_ground_state_keeps_one_sign() {
    for op in [spectral_op(), fd_op()] {
        let es = op.eigensystem(6).unwrap();
        assert!(!es.eigenvectors[0].changes_sign(), "ground state changes sign");
        for (k, v) in es.eigenvectors.iter().enumerate().skip(1) {
            assert!(v.changes_sign(), "eigenvector {} does not change sign", k + 1);
        }
        assert!(es.orthonormality_error() < 1e-8);
    }
}

#[test]
fn backends_agree_on_first_six_levels() {
    let a = spectral_op().eigensystem(6).unwrap().eigenvalues;
    let b = fd_op().eigensystem(6).unwrap().eigenvalues;
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 2e-3, "spectral {x} vs fd {y}");
    }
}

#[test]
fn operator_is_symmetric() {
    assert!(spectral_op().symmetry_defect() < 1e-12);
    assert!(fd_op().symmetry_defect() < 1e-12);
}

#[test]
fn zero_field_is_rejected() {
    let d: Arc<Discretization> = Discretization::finite_difference(101, 12.0, 0.0).unwrap();
    assert!(sphere_project(&FieldSample::zeros(&d)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parts_decompose_the_field(c in coords(32)) {
        let op = spectral_op();
        let u = field(&op, &c);
        let back = u.positive_part().combine(1.0, &u.negative_part(), -1.0).unwrap();
        prop_assert_eq!(back.values(), u.values());
        prop_assert_eq!(inner_product_k(&u.positive_part(), &u.negative_part()).unwrap(), 0.0);
    }

    #[test]
    fn sphere_projection_has_unit_norm(c in coords(32), scale in 1e-6..1e6f64) {
        let op = spectral_op();
        let u = field(&op, &c).scaled(scale);
        let s = sphere_project(&u).unwrap();
        prop_assert!((s.norm_k() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_norm_is_coercive(c in coords(32)) {
        let op = spectral_op();
        let u = field(&op, &c);
        let n2 = u.norm_k().powi(2);
        prop_assert!(x_seminorm_sq(&u, &op).unwrap() >= 0.5 * n2 - 1e-9);
    }

    #[test]
    fn fd_energy_norm_is_coercive(v in prop::collection::vec(-1.0..1.0f64, 801)) {
        let op = fd_op();
        let (l1, _) = op.ground_state().unwrap();
        let u = FieldSample::new(op.disc(), v).unwrap();
        prop_assert!(x_seminorm_sq(&u, &op).unwrap() >= l1 * u.norm_k().powi(2) - 1e-9);
    }

    #[test]
    fn reflection_identity(c in coords(32), p in -10.0..10.0f64) {
        let op = spectral_op();
        let u = field(&op, &c).sphere_project().unwrap();
        let lhs = tilde_i_p(&u.neg(), -p, &op).unwrap();
        let rhs = tilde_i_p(&u, p, &op).unwrap() + p;
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn energy_is_bounded_below(c in coords(32), p in -10.0..10.0f64, eps in 0.0..0.1f64, sign in prop::bool::ANY) {
        let op = spectral_op();
        // perturbations of ±φ̂₁ come close to the bound
        let (_, phi) = op.ground_state().unwrap();
        let s = if sign { 1.0 } else { -1.0 };
        let u = phi.combine(s, &field(&op, &c), eps).unwrap().sphere_project().unwrap();
        prop_assert!(tilde_i_p(&u, p, &op).unwrap() >= 0.5 - p.max(0.0) - 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences(c in coords(32), d in coords(32), p in -5.0..5.0f64) {
        let op = spectral_op();
        let u = field(&op, &c).sphere_project().unwrap();
        let raw = field(&op, &d);
        let along = inner_product_k(&raw, &u).unwrap();
        let dir = raw.combine(1.0, &u, -along).unwrap();
        prop_assume!(dir.norm_k() > 1e-3);
        let h = 1e-6;
        let at = |s: f64| tilde_i_p(&u.combine(1.0, &dir, s).unwrap().sphere_project().unwrap(), p, &op).unwrap();
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let exact = 2.0 * inner_product_k(&constrained_grad(&u, p, &op).unwrap(), &dir).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "fd {} vs {}", fd, exact);
    }
}
