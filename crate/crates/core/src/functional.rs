//! The Fučik energy `Ĩ_p(u) = ‖u‖² − p|u⁺|²` on the unit sphere, its
//! constrained gradient and the residual of `Lu = αu⁺ − βu⁻`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operator::DiscreteOperator;
use crate::weighted::{dot, FieldSample, SpherePoint};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FucikPoint {
    pub alpha: f64,
    pub beta: f64,
}

impl FucikPoint {
    /// The point `(p + t, t)` attached to level `t` of `Ĩ_p`.
    pub fn from_level(p: f64, t: f64) -> Self {
        Self { alpha: p + t, beta: t }
    }

    pub fn parameter(&self) -> f64 {
        self.alpha - self.beta
    }

    /// On one of the two trivial lines `α = λ₁` or `β = λ₁`.
    pub fn on_trivial_lines(&self, lambda1: f64, tol: f64) -> bool {
        (self.alpha - lambda1).abs() <= tol || (self.beta - lambda1).abs() <= tol
    }

    pub fn on_diagonal(&self, tol: f64) -> bool {
        (self.alpha - self.beta).abs() <= tol
    }
}

#[derive(Clone, Debug)]
pub struct CriticalCandidate {
    pub u: SpherePoint,
    pub t: f64,
    pub p: f64,
    pub grad_norm: f64,
    pub residual: f64,
}

impl CriticalCandidate {
    pub fn evaluate(u: SpherePoint, p: f64, op: &DiscreteOperator) -> Result<Self> {
        let t = tilde_i_p(&u, p, op)?;
        let grad_norm = constrained_grad(&u, p, op)?.norm_k();
        let residual = fucik_residual(&u, FucikPoint::from_level(p, t), op)?;
        Ok(Self { u, t, p, grad_norm, residual })
    }
}

pub fn tilde_i_p(u: &SpherePoint, p: f64, op: &DiscreteOperator) -> Result<f64> {
    let q = op.quadratic(u)?;
    let plus = u.positive_part();
    Ok(q - p * dot(plus.values(), plus.values()))
}

/// `r = Au − p·u⁺ − t·u` with `t = Ĩ_p(u)`; half the tangential gradient.
/// For the spectral backend `u⁺` is replaced by its Galerkin projection.
pub fn constrained_grad(u: &SpherePoint, p: f64, op: &DiscreteOperator) -> Result<FieldSample> {
    let t = tilde_i_p(u, p, op)?;
    let au = op.apply(u)?;
    let plus = op.project(&u.positive_part())?;
    let values = au.values().iter().zip(plus.values()).zip(u.values()).map(|((a, b), c)| a - p * b - t * c).collect();
    Ok(u.with_values(values))
}

/// `|Au − α·u⁺ + β·u⁻|`, Euclidean on the stored samples.
pub fn fucik_residual(u: &SpherePoint, point: FucikPoint, op: &DiscreteOperator) -> Result<f64> {
    let au = op.apply(u)?;
    let rhs: Vec<f64> = u.values().iter().map(|&v| if v > 0.0 { point.alpha * v } else { point.beta * v }).collect();
    let rhs = op.project(&u.with_values(rhs))?;
    Ok(au.values().iter().zip(rhs.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
}

/// `Ĩ_p` and its gradient in operator coordinates, where the sphere is the
/// Euclidean unit sphere (the sampled basis has orthonormal columns).
pub(crate) struct ReducedFucik<'a> {
    pub op: &'a DiscreteOperator,
    pub p: f64,
}

impl ReducedFucik<'_> {
    pub fn positive_coords(&self, c: &[f64]) -> Vec<f64> {
        let samples = self.op.from_coords(c);
        let plus: Vec<f64> = samples.iter().map(|v| v.max(0.0)).collect();
        self.op.to_coords(&plus)
    }

    pub fn energy(&self, c: &[f64]) -> f64 {
        let samples = self.op.from_coords(c);
        let plus: f64 = samples.iter().map(|v| v.max(0.0).powi(2)).sum();
        dot(c, &self.op.mul_coords(c)) - self.p * plus
    }

    /// `(t, r)` with `r = Mc − p·P(c)⁺ − t c`.
    pub fn half_gradient(&self, c: &[f64]) -> (f64, Vec<f64>) {
        let mc = self.op.mul_coords(c);
        let samples = self.op.from_coords(c);
        let plus_sq: f64 = samples.iter().map(|v| v.max(0.0).powi(2)).sum();
        let t = dot(c, &mc) - self.p * plus_sq;
        let plus = self.positive_coords(c);
        let r = mc.iter().zip(&plus).zip(c).map(|((m, q), x)| m - self.p * q - t * x).collect();
        (t, r)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub seed: u64,
    /// `max |Ĩ_{−p}(−u) − Ĩ_p(u) − p|`.
    pub reflection_defect: f64,
    /// `max (λ₁ − max(p, 0) − Ĩ_p(u))`; nonpositive when the bound holds.
    pub lower_bound_excess: f64,
    /// Central differences along tangent directions against `2⟨r, d⟩`,
    /// relative to `max(|2⟨r, d⟩|, 1)`.
    pub gradient_error: f64,
    pub passed: bool,
}

fn random_unit(op: &DiscreteOperator, rng: &mut ChaCha8Rng) -> Result<SpherePoint> {
    let c: Vec<f64> = (0..op.reduced_dim()).map(|_| StandardNormal.sample(rng)).collect();
    FieldSample::new(op.disc(), op.from_coords(&c))?.sphere_project()
}

/// Reflection identity, lower bound and gradient consistency on `samples`
/// random sphere points, with `p` spread over `[−p_max, p_max]`. Every other
/// point is a small perturbation of `±φ̂₁`, where the lower bound is nearly
/// attained.
pub fn identity_suite(op: &DiscreteOperator, samples: usize, p_max: f64, seed: u64) -> Result<IdentityReport> {
    let (lambda1, phi) = op.ground_state()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut reflection, mut excess, mut grad) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let h = 1e-6;
    for i in 0..samples {
        let p = if samples > 1 { p_max * (2.0 * i as f64 / (samples - 1) as f64 - 1.0) } else { 0.0 };
        let mut u = random_unit(op, &mut rng)?;
        if i % 2 == 1 {
            let sign = if i % 4 == 1 { 1.0 } else { -1.0 };
            u = phi.combine(sign, &u, 1e-2)?.sphere_project()?;
        }
        let e = tilde_i_p(&u, p, op)?;
        reflection = reflection.max((tilde_i_p(&u.neg(), -p, op)? - e - p).abs());
        // |u⁺| ≤ 1 gives Ĩ_p ≥ λ₁ − p for p ≥ 0; for p < 0 the term only adds
        excess = excess.max(lambda1 - p.max(0.0) - e);
        let raw = random_unit(op, &mut rng)?;
        let d = raw.combine(1.0, &u, -dot(raw.values(), u.values()))?;
        let at = |s: f64| tilde_i_p(&u.combine(1.0, &d, s)?.sphere_project()?, p, op);
        let fd = (at(h)? - at(-h)?) / (2.0 * h);
        let exact = 2.0 * dot(constrained_grad(&u, p, op)?.values(), d.values());
        grad = grad.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    Ok(IdentityReport {
        samples,
        seed,
        reflection_defect: reflection,
        lower_bound_excess: excess,
        gradient_error: grad,
        passed: reflection <= 1e-10 && excess <= 1e-10 && grad < 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted::{Backend, Discretization};

    fn setup() -> (DiscreteOperator, SpherePoint, SpherePoint) {
        let d = Discretization::new(1, Backend::Spectral, 16, 12.0).unwrap();
        let op = DiscreteOperator::assemble(&d).unwrap();
        let es = op.eigensystem(2).unwrap();
        let phi = es.eigenvectors[0].sphere_project().unwrap();
        let psi = es.eigenvectors[1].sphere_project().unwrap();
        (op, phi, psi)
    }

    #[test]
    fn ground_state_levels() {
        let (op, phi, psi) = setup();
        for p in [0.0, 1.0, 5.0] {
            assert!((tilde_i_p(&phi, p, &op).unwrap() - (0.5 - p)).abs() < 1e-12);
            assert!((tilde_i_p(&phi.neg(), p, &op).unwrap() - 0.5).abs() < 1e-12);
            assert!(constrained_grad(&phi, p, &op).unwrap().norm_k() < 1e-10);
            assert!(constrained_grad(&phi.neg(), p, &op).unwrap().norm_k() < 1e-10);
        }
        assert!((tilde_i_p(&psi, 0.0, &op).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_mode_gradient_norm() {
        let (op, phi, psi) = setup();
        let u = phi.combine(1.0, &psi, 1.0).unwrap().sphere_project().unwrap();
        let r = constrained_grad(&u, 0.0, &op).unwrap();
        assert!((r.norm_k() - 0.25).abs() < 1e-12);
        assert!(dot(r.values(), u.values()).abs() < 1e-12);
    }

    #[test]
    fn residuals_on_known_points() {
        let (op, phi, psi) = setup();
        for p in [0.0, 1.0, 5.0] {
            assert!(fucik_residual(&phi, FucikPoint { alpha: 0.5, beta: 0.5 - p }, &op).unwrap() < 1e-10);
            assert!(fucik_residual(&phi.neg(), FucikPoint { alpha: 0.5 + p, beta: 0.5 }, &op).unwrap() < 1e-10);
        }
        assert!(fucik_residual(&psi, FucikPoint { alpha: 1.0, beta: 1.0 }, &op).unwrap() < 1e-10);
        assert!(fucik_residual(&psi, FucikPoint { alpha: 1.5, beta: 1.0 }, &op).unwrap() > 1e-3);
    }

    #[test]
    fn point_predicates() {
        let q = FucikPoint::from_level(2.0, 0.7);
        assert_eq!(q.parameter(), 2.0);
        assert!(!q.on_diagonal(1e-9));
        assert!(FucikPoint { alpha: 0.5, beta: 3.0 }.on_trivial_lines(0.5, 1e-12));
    }
}
