//! Positive solutions of the semilinear problem and the supporting checks.

use fucik_core::nonlinear::{
    energy, energy_grad, mountain_pass_geometry_check, solve_two_solutions, Family, NonlinearOptions, Nonlinearity,
    DEFAULT_RADII,
};
use fucik_core::{inner_product_k, DiscreteOperator, Discretization, FieldSample, FucikError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn fd_op() -> DiscreteOperator {
    DiscreteOperator::assemble(&Discretization::finite_difference(801, 12.0, 0.0).unwrap()).unwrap()
}

fn default_nl() -> Nonlinearity {
    Nonlinearity::new(2.0, 1.6, Family::notched())
}

#[test]
fn gradient_matches_finite_differences() {
    let op = fd_op();
    let nl = default_nl();
    let (_, phi) = op.ground_state().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let modes = op.eigensystem(6).unwrap().eigenvectors;
    for k in 0..50 {
        // smooth random fields: mixtures of the first modes around a multiple of φ̂₁
        let mix = |rng: &mut ChaCha8Rng| {
            modes.iter().fold(FieldSample::zeros(op.disc()), |acc, m| {
                let a: f64 = StandardNormal.sample(rng);
                acc.combine(1.0, m, a).unwrap()
            })
        };
        let u = phi.combine(0.05 * (1 + k) as f64, &mix(&mut rng), 0.2).unwrap();
        let d = mix(&mut rng);
        let h = 1e-6;
        let fd = (energy(&u.combine(1.0, &d, h).unwrap(), &nl, &op).unwrap()
            - energy(&u.combine(1.0, &d, -h).unwrap(), &nl, &op).unwrap())
            / (2.0 * h);
        let exact = inner_product_k(&energy_grad(&u, &nl, &op).unwrap(), &d).unwrap();
        assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "direction {k}: fd {fd} vs {exact}");
    }
}

#[test]
fn energy_is_negative_near_zero_and_far_out_along_ground_state() {
    let op = fd_op();
    let (_, phi) = op.ground_state().unwrap();
    // largest rescaled sample u/S per unit multiple of φ̂₁
    let peak = phi.values().iter().zip(op.disc().scale()).fold(0.0f64, |m, (v, s)| m.max(v.abs() / s));
    for nl in [default_nl(), Nonlinearity::new(2.0, 1.6, Family::Saturating)] {
        let small = 1e-5 / peak;
        for k in 1..=20 {
            let t = small * k as f64 / 20.0;
            assert!(energy(&phi.scaled(t), &nl, &op).unwrap() < 0.0, "{nl:?} at t = {t:e}");
        }
        for k in 0..=20 {
            let t = 1e3 * 10f64.powf(k as f64 / 10.0);
            assert!(energy(&phi.scaled(t), &nl, &op).unwrap() < 0.0, "{nl:?} at t = {t:e}");
        }
    }
}

#[test]
fn default_pair_is_positive_and_distinct() {
    let op = fd_op();
    let pair = solve_two_solutions(&default_nl(), &op, &NonlinearOptions::default()).unwrap();
    let r = pair.verify().unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.energies[0] < 0.0 && r.energies[1] > 0.0);
    // a converged solution has no negative part
    for n in r.negative_part_norms {
        assert!(n < 1e-8, "negative part {n:e}");
    }
    assert!(pair.geometry.detected);
    assert!(pair.geometry.rho.is_some_and(|r| r > 0.0 && r <= 1.0));
}

#[test]
fn seed_only_changes_the_geometry_scan() {
    let op = fd_op();
    let a =
        solve_two_solutions(&default_nl(), &op, &NonlinearOptions { seed: 7, ..NonlinearOptions::default() }).unwrap();
    let b =
        solve_two_solutions(&default_nl(), &op, &NonlinearOptions { seed: 8, ..NonlinearOptions::default() }).unwrap();
    let d1 = a.u1.combine(1.0, &b.u1, -1.0).unwrap().norm_k();
    let d2 = a.u2.combine(1.0, &b.u2, -1.0).unwrap().norm_k();
    assert!(d1 < 1e-5 && d2 < 1e-5, "seed changed the solutions by {d1:e}, {d2:e}");
}

#[test]
fn limits_below_ground_level_are_rejected() {
    let op = fd_op();
    let nl = Nonlinearity::new(0.4, 1.6, Family::notched());
    match solve_two_solutions(&nl, &op, &NonlinearOptions::default()) {
        Err(FucikError::InvalidArgument(msg)) => assert!(msg.contains("f₀ ≤ λ₁"), "{msg}"),
        other => panic!("expected a config error, got {:?}", other.map(|p| p.energies)),
    }
}

#[test]
fn saturating_family_has_no_positive_solution() {
    let op = fd_op();
    let nl = Nonlinearity::new(2.0, 1.6, Family::Saturating);
    let (l1, _) = op.ground_state().unwrap();
    assert!(nl.excludes_positive_solutions(l1));
    let g = mountain_pass_geometry_check(&nl, &op, &DEFAULT_RADII, 100, 7).unwrap();
    assert!(!g.detected);
}

#[test]
fn families_reach_their_limits() {
    for nl in [default_nl(), Nonlinearity::new(2.0, 1.6, Family::Saturating)] {
        assert!(nl.limit_defect() < 1e-4);
        assert_eq!(nl.f_eval(-3.0), 0.0);
        assert!((0..200).all(|k| nl.f_eval(1e-4 * 1.2f64.powi(k)) >= 0.0));
    }
}
