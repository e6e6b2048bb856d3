//! Two positive solutions of `−Lu = f(u)` for an asymptotically linear `f`
//! with `f(t)/t → f0` at zero and `→ finf` at infinity, both above `λ₁`.
//!
//! Samples carry `U_i = S_i u(x_i)`, so the energy is
//! `½UᵀAU − Σ S_i² F(U_i / S_i)` and its gradient is `AU − g` with
//! `g_i = S_i f(U_i / S_i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eigen::TridiagonalLu;
use crate::error::{FucikError, Result};
use crate::minimax::engine::{self, DeformOptions, Landscape};
use crate::operator::{DiscreteOperator, OperatorMatrix};
use crate::weighted::{dot, norm, Backend, FieldSample};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `f(t) = t·(finf + (f0 − finf)/(1 + t²))`.
    Saturating,
    /// `f(t)/t = f0/(1 + (t/inner)²) + finf·(t/outer)²/(1 + (t/outer)²)`: the
    /// ratio drops towards zero between `inner` and `outer`.
    Notched { inner: f64, outer: f64 },
}

impl Family {
    pub fn notched() -> Self {
        Family::Notched { inner: 1e-3, outer: 10.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub f0: f64,
    pub finf: f64,
    /// Subcritical growth exponent; kept for the record, the families grow linearly.
    pub q: f64,
    pub family: Family,
}

impl Nonlinearity {
    pub fn new(f0: f64, finf: f64, family: Family) -> Self {
        Self { f0, finf, q: 3.0, family }
    }

    /// Both limits must exceed the principal eigenvalue.
    pub fn validate(&self, lambda1: f64) -> Result<()> {
        if !(self.f0 > lambda1) {
            return Err(FucikError::InvalidArgument(format!("f0 = {} must exceed λ₁ = {lambda1} (f₀ ≤ λ₁)", self.f0)));
        }
        if !(self.finf > lambda1) {
            return Err(FucikError::InvalidArgument(format!(
                "finf = {} must exceed λ₁ = {lambda1} (f_∞ ≤ λ₁)",
                self.finf
            )));
        }
        if let Family::Notched { inner, outer } = self.family {
            if !(inner > 0.0 && outer > inner) {
                return Err(FucikError::InvalidArgument("notch needs 0 < inner < outer".into()));
            }
        }
        Ok(())
    }

    /// `f(t)/t` for `t > 0`.
    pub fn ratio(&self, t: f64) -> f64 {
        match self.family {
            Family::Saturating => self.finf + (self.f0 - self.finf) / (1.0 + t * t),
            Family::Notched { inner, outer } => {
                let ya = (t / inner).powi(2);
                let yb = (t / outer).powi(2);
                self.f0 / (1.0 + ya) + self.finf * yb / (1.0 + yb)
            }
        }
    }

    pub fn f_eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            t * self.ratio(t)
        }
    }

    /// `F(t) = ∫₀ᵗ f`.
    pub fn primitive_eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Saturating => 0.5 * self.finf * t * t + 0.5 * (self.f0 - self.finf) * (t * t).ln_1p(),
            Family::Notched { inner, outer } => {
                let ya = (t / inner).powi(2);
                let yb = (t / outer).powi(2);
                0.5 * self.f0 * inner * inner * ya.ln_1p() + 0.5 * self.finf * outer * outer * (yb - yb.ln_1p())
            }
        }
    }

    /// `f′(t)`, zero for `t ≤ 0`.
    pub fn derivative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Saturating => {
                let s = 1.0 + t * t;
                self.finf + (self.f0 - self.finf) * (1.0 - t * t) / (s * s)
            }
            Family::Notched { inner, outer } => {
                let ya = (t / inner).powi(2);
                let yb = (t / outer).powi(2);
                self.f0 * (1.0 - ya) / (1.0 + ya).powi(2) + self.finf * yb * (3.0 + yb) / (1.0 + yb).powi(2)
            }
        }
    }

    /// Largest relative error of `f(t)/t` against `f0` at `t = 1e−6` and
    /// against `finf` at `t = 1e6`.
    pub fn limit_defect(&self) -> f64 {
        let lo = (self.ratio(1e-6) - self.f0).abs() / self.f0.abs();
        let hi = (self.ratio(1e6) - self.finf).abs() / self.finf.abs();
        lo.max(hi)
    }

    /// When `f(t)/t > λ₁` for every `t > 0`, testing the equation against the
    /// positive ground state gives `λ₁∫uφ₁K = ∫f(u)φ₁K > λ₁∫uφ₁K`, so no
    /// positive solution exists. Sampled on a log grid.
    pub fn excludes_positive_solutions(&self, lambda1: f64) -> bool {
        let min = (-120..=120).map(|k| self.ratio(10f64.powf(k as f64 / 10.0))).fold(f64::INFINITY, f64::min);
        min > lambda1
    }
}

/// Energy `I(u) = ½uᵀAu − Σ S² F(u/S)`.
pub fn energy(u: &FieldSample, nl: &Nonlinearity, op: &DiscreteOperator) -> Result<f64> {
    let q = op.quadratic(u)?;
    Ok(0.5 * q - potential(u.values(), u.disc().scale(), nl))
}

/// `Au − Π g`.
pub fn energy_grad(u: &FieldSample, nl: &Nonlinearity, op: &DiscreteOperator) -> Result<FieldSample> {
    let g = u.with_values(source(u.values(), u.disc().scale(), nl));
    op.apply(u)?.combine(1.0, &op.project(&g)?, -1.0)
}

fn potential(values: &[f64], scale: &[f64], nl: &Nonlinearity) -> f64 {
    values.iter().zip(scale).map(|(v, s)| s * s * nl.primitive_eval(v / s)).sum()
}

fn source(values: &[f64], scale: &[f64], nl: &Nonlinearity) -> Vec<f64> {
    values.iter().zip(scale).map(|(v, s)| s * nl.f_eval(v / s)).collect()
}

/// `I` on a finite-difference grid, with the gradient preconditioned by `A⁻¹`
/// (steepest descent in the `X` metric).
struct Problem<'a> {
    nl: &'a Nonlinearity,
    op: &'a DiscreteOperator,
    scale: &'a [f64],
    lu: TridiagonalLu,
}

impl<'a> Problem<'a> {
    fn new(nl: &'a Nonlinearity, op: &'a DiscreteOperator) -> Result<Self> {
        let OperatorMatrix::Tridiagonal { diag, off } = op.matrix() else {
            return Err(FucikError::Unsupported("nonlinear solves run on finite-difference grids".into()));
        };
        let lu = TridiagonalLu::new(off, diag, off)?;
        Ok(Self { nl, op, scale: op.disc().scale(), lu })
    }

    fn x_norm(&self, u: &[f64]) -> f64 {
        dot(u, &self.op.mul_coords(u)).max(0.0).sqrt()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let au = self.op.mul_coords(u);
        au.iter().zip(source(u, self.scale, self.nl)).map(|(a, g)| a - g).collect()
    }

    fn solve_a(&self, mut b: Vec<f64>) -> Vec<f64> {
        self.lu.solve(&mut b);
        b
    }

    /// Damped Newton on `AU − g(U) = 0` with `J = A − diag(f′(U/S))`.
    fn newton(&self, start: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64, usize) {
        let OperatorMatrix::Tridiagonal { diag, off } = self.op.matrix() else { unreachable!() };
        let mut u = start.to_vec();
        let mut r = self.residual(&u);
        let mut res = norm(&r);
        let mut it = 0;
        while res > tol && it < max_iter {
            it += 1;
            let jd: Vec<f64> =
                diag.iter().zip(&u).zip(self.scale).map(|((d, v), s)| d - self.nl.derivative(v / s)).collect();
            let lu = TridiagonalLu::new_regularized(off, &jd, off, 1e-14);
            let mut step: Vec<f64> = r.iter().map(|x| -x).collect();
            lu.solve(&mut step);
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = u.iter().zip(&step).map(|(a, b)| a + lambda * b).collect();
                let rt = self.residual(&trial);
                let nt = norm(&rt);
                if nt < res {
                    u = trial;
                    r = rt;
                    res = nt;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (u, res, it)
    }
}

impl Landscape for Problem<'_> {
    fn energy(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.op.mul_coords(x)) - potential(x, self.scale, self.nl)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.residual(x)
    }
    fn stationarity(&self, x: &[f64]) -> f64 {
        norm(&self.residual(x))
    }
    fn retract(&self, x: Vec<f64>) -> Vec<f64> {
        x
    }
    fn tangent(&self, _x: &[f64], v: Vec<f64>) -> Vec<f64> {
        v
    }
    fn precondition(&self, _x: &[f64], g: Vec<f64>) -> Vec<f64> {
        self.solve_a(g)
    }
    fn metric(&self, a: &[f64], b: &[f64]) -> f64 {
        dot(a, &self.op.mul_coords(b))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryReport {
    /// Radii in the `X` norm.
    pub radii: Vec<f64>,
    /// Minimum sampled energy on each sphere.
    pub min_energy: Vec<f64>,
    pub directions: usize,
    /// Radii whose sampled minimum is positive.
    pub positive_radii: Vec<f64>,
    /// Radius with the largest sampled minimum, when that minimum is positive.
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    /// `(t, ‖tφ̂₁‖, I(tφ̂₁))` with `‖tφ̂₁‖ > ρ` and negative energy.
    pub far_point: Option<(f64, f64, f64)>,
    pub detected: bool,
}

pub const DEFAULT_RADII: [f64; 7] = [0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0];

/// Number of low eigenmodes spanning the random test directions.
const GEOMETRY_MODES: usize = 8;

/// Samples `I` on spheres `‖u‖ = ρ` and looks for a far point of negative
/// energy along `φ̂₁`.
///
/// Directions are random combinations of the lowest eigenmodes, plus `±φ̂₁`.
pub fn mountain_pass_geometry_check(
    nl: &Nonlinearity,
    op: &DiscreteOperator,
    radii: &[f64],
    directions: usize,
    seed: u64,
) -> Result<GeometryReport> {
    let es = op.eigensystem(GEOMETRY_MODES.min(op.reduced_dim()))?;
    let disc = op.disc();
    let x_norm = |u: &[f64]| dot(u, &op.mul_coords(&op.to_coords(u))).max(0.0).sqrt();
    let e = |u: &[f64]| -> Result<f64> { energy(&FieldSample::new(disc, u.to_vec())?, nl, op) };
    let phi = es.eigenvectors[0].values().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs: Vec<Vec<f64>> = vec![phi.clone(), phi.iter().map(|v| -v).collect()];
    while dirs.len() < directions.max(2) {
        let mut v = vec![0.0; phi.len()];
        for mode in &es.eigenvectors {
            let c: f64 = StandardNormal.sample(&mut rng);
            for (a, b) in v.iter_mut().zip(mode.values()) {
                *a += c * b;
            }
        }
        dirs.push(v);
    }
    for d in &mut dirs {
        let n = x_norm(d);
        d.iter_mut().for_each(|v| *v /= n);
    }
    let mut min_energy = Vec::with_capacity(radii.len());
    for &rho in radii {
        let mut m = f64::INFINITY;
        for d in &dirs {
            let u: Vec<f64> = d.iter().map(|v| rho * v).collect();
            m = m.min(e(&u)?);
        }
        min_energy.push(m);
    }
    let best =
        (0..radii.len()).filter(|&i| min_energy[i] > 0.0).max_by(|&a, &b| min_energy[a].total_cmp(&min_energy[b]));
    let rho = best.map(|i| radii[i]);
    let alpha = best.map(|i| min_energy[i]);
    let mut far_point = None;
    if let Some(rho) = rho {
        let unit = x_norm(&phi);
        for k in 0..=60 {
            let t = 10f64.powf(-1.0 + k as f64 * 0.1);
            let nrm = t * unit;
            if nrm <= rho {
                continue;
            }
            let u: Vec<f64> = phi.iter().map(|v| t * v).collect();
            let en = e(&u)?;
            if en < 0.0 {
                far_point = Some((t, nrm, en));
                break;
            }
        }
    }
    let positive_radii = radii.iter().zip(&min_energy).filter(|(_, e)| **e > 0.0).map(|(r, _)| *r).collect();
    Ok(GeometryReport {
        radii: radii.to_vec(),
        min_energy,
        directions: dirs.len(),
        positive_radii,
        rho,
        alpha,
        detected: rho.is_some() && far_point.is_some(),
        far_point,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonlinearOptions {
    pub seed: u64,
    pub radii: Vec<f64>,
    pub directions: usize,
    /// Stationarity target for the minimization phase.
    pub descent_tol: f64,
    pub descent_max_iter: usize,
    pub path_nodes: usize,
    pub deform: DeformOptions,
    pub newton_tol: f64,
}

impl Default for NonlinearOptions {
    fn default() -> Self {
        Self {
            seed: 7,
            radii: DEFAULT_RADII.to_vec(),
            directions: 500,
            descent_tol: 1e-8,
            descent_max_iter: 20_000,
            path_nodes: 41,
            deform: DeformOptions { gtol: 1e-8, ..DeformOptions::default() },
            newton_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolutionPair {
    /// Local minimizer inside the ball, negative energy.
    pub u1: FieldSample,
    /// Mountain-pass solution, positive energy.
    pub u2: FieldSample,
    pub energies: [f64; 2],
    pub residuals: [f64; 2],
    pub geometry: GeometryReport,
    pub descent_iterations: usize,
    pub pass_iterations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairReport {
    pub energies: [f64; 2],
    pub residuals: [f64; 2],
    pub min_samples: [f64; 2],
    pub negative_part_norms: [f64; 2],
    pub separation: f64,
    pub energies_ordered: bool,
    pub residuals_ok: bool,
    pub nonnegative: bool,
    pub distinct: bool,
    pub passed: bool,
}

impl SolutionPair {
    pub fn verify(&self) -> Result<PairReport> {
        let min_samples = [self.u1.min_value(), self.u2.min_value()];
        let negative_part_norms = [self.u1.negative_part().norm_k(), self.u2.negative_part().norm_k()];
        let separation = self.u1.combine(1.0, &self.u2, -1.0)?.norm_k();
        let energies_ordered = self.energies[0] < 0.0 && 0.0 < self.energies[1];
        let residuals_ok = self.residuals.iter().all(|r| *r < 1e-6);
        let nonnegative = min_samples.iter().all(|m| *m >= -1e-10);
        let distinct = separation > 1e-3;
        Ok(PairReport {
            energies: self.energies,
            residuals: self.residuals,
            min_samples,
            negative_part_norms,
            separation,
            energies_ordered,
            residuals_ok,
            nonnegative,
            distinct,
            passed: energies_ordered && residuals_ok && nonnegative && distinct,
        })
    }
}

/// Projected descent in the `X` metric inside `‖u‖ ≤ ρ`, started at `start`.
fn minimize_in_ball(pb: &Problem, start: Vec<f64>, rho: f64, tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let project = |mut u: Vec<f64>| {
        let n = pb.x_norm(&u);
        if n > rho {
            u.iter_mut().for_each(|v| *v *= rho / n);
        }
        u
    };
    let mut u = project(start);
    let mut e = pb.energy(&u);
    let mut step = 1.0f64;
    let mut on_boundary = 0;
    for it in 0..max_iter {
        let g = pb.residual(&u);
        if norm(&g) < tol {
            return Ok((u, it));
        }
        let d = pb.solve_a(g.clone());
        let mut s = (2.0 * step).min(1.0);
        let mut moved = false;
        for _ in 0..60 {
            let trial = project(u.iter().zip(&d).map(|(a, b)| a - s * b).collect());
            let et = pb.energy(&trial);
            // projected Armijo test
            let predicted: f64 = g.iter().zip(u.iter().zip(&trial)).map(|(gi, (a, b))| gi * (a - b)).sum();
            if et <= e - 1e-4 * predicted && et < e {
                if pb.x_norm(&trial) >= rho * (1.0 - 1e-12) {
                    on_boundary += 1;
                } else {
                    on_boundary = 0;
                }
                u = trial;
                e = et;
                step = s;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if on_boundary > 50 {
            return Err(FucikError::BallExit);
        }
        if !moved {
            return Ok((u, it));
        }
    }
    Ok((u, max_iter))
}

/// Minimizer of negative energy near zero and a mountain-pass solution.
pub fn solve_two_solutions(nl: &Nonlinearity, op: &DiscreteOperator, opts: &NonlinearOptions) -> Result<SolutionPair> {
    if op.disc().backend() != Backend::FiniteDifference {
        return Err(FucikError::Unsupported("nonlinear solves run on finite-difference grids".into()));
    }
    let (lambda1, phi) = op.ground_state()?;
    nl.validate(lambda1)?;
    let geometry = mountain_pass_geometry_check(nl, op, &opts.radii, opts.directions, opts.seed)?;
    if !geometry.detected {
        return Err(FucikError::GeometryNotDetected);
    }
    let rho = geometry.rho.expect("detected geometry has a radius");
    let (t_far, _, _) = geometry.far_point.expect("detected geometry has a far point");
    let pb = Problem::new(nl, op)?;
    let phi = phi.values().to_vec();
    let unit = pb.x_norm(&phi);

    // start at the lowest sampled energy along φ̂₁ inside the ball
    let t1 = (0..=60)
        .map(|k| 10f64.powf(-6.0 + k as f64 * 0.1) * rho / unit)
        .filter(|t| t * unit < rho)
        .map(|t| (t, pb.energy(&phi.iter().map(|v| t * v).collect::<Vec<_>>())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(t, _)| t)
        .unwrap_or(1e-3 * rho / unit);
    let start: Vec<f64> = phi.iter().map(|v| t1 * v).collect();
    let (u1, descent_iterations) = minimize_in_ball(&pb, start, rho, opts.descent_tol, opts.descent_max_iter)?;
    let (u1, r1, _) = pb.newton(&u1, opts.newton_tol, 50);
    if pb.x_norm(&u1) >= rho {
        return Err(FucikError::BallExit);
    }

    let m = opts.path_nodes;
    let path: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let s = t_far * i as f64 / (m - 1) as f64;
            phi.iter().map(|v| s * v).collect()
        })
        .collect();
    let pass = engine::deform(&pb, path, &opts.deform);
    if !pass.converged && pass.grad_norm > 1e-3 {
        return Err(FucikError::MountainPassStalled { grad_norm: pass.grad_norm, iterations: pass.iterations });
    }
    let (u2, r2, _) = pb.newton(&pass.best, opts.newton_tol, 50);

    let e1 = pb.energy(&u1);
    let e2 = pb.energy(&u2);
    let disc = op.disc();
    Ok(SolutionPair {
        u1: FieldSample::new(disc, u1)?,
        u2: FieldSample::new(disc, u2)?,
        energies: [e1, e2],
        residuals: [r1, r2],
        geometry,
        descent_iterations,
        pass_iterations: pass.iterations,
    })
}
