//! Semismooth Newton for `Mc − p·P(c)⁺ − t·c = 0`, `|c| = 1`.
//!
//! The sign pattern of the samples is frozen at each iterate; the Jacobian
//! alone is singular at a solution (the equation is homogeneous in `c`), so
//! it is bordered with the normalization row.

use nalgebra::{DMatrix, DVector};

use crate::error::{FucikError, Result};
use crate::functional::ReducedFucik;
use crate::operator::DiscreteOperator;
use crate::weighted::{dot, norm};

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub coords: Vec<f64>,
    pub t: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonSettings {
    /// Stop once the residual is below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 50 }
    }
}

fn residual(rf: &ReducedFucik, c: &[f64], t: f64) -> (Vec<f64>, f64) {
    let mc = rf.op.mul_coords(c);
    let plus = rf.positive_coords(c);
    let f: Vec<f64> = mc.iter().zip(&plus).zip(c).map(|((m, q), x)| m - rf.p * q - t * x).collect();
    let g = 0.5 * (1.0 - dot(c, c));
    (f, g)
}

fn merit(f: &[f64], g: f64) -> f64 {
    (dot(f, f) + g * g).sqrt()
}

/// Sampled-basis rows restricted to the positive samples, `BᵀDB`.
fn masked_gram(op: &DiscreteOperator, c: &[f64]) -> DMatrix<f64> {
    let n = op.reduced_dim();
    let samples = op.from_coords(c);
    match op.disc().basis() {
        Some(b) if matches!(op.matrix(), crate::operator::OperatorMatrix::Diagonal(_)) => {
            let rows: Vec<usize> = (0..samples.len()).filter(|&i| samples[i] > 0.0).collect();
            let sub = b.matrix.select_rows(rows.iter());
            sub.tr_mul(&sub)
        }
        _ => DMatrix::from_fn(n, n, |i, j| if i == j && samples[i] > 0.0 { 1.0 } else { 0.0 }),
    }
}

pub fn solve(op: &DiscreteOperator, p: f64, start: &[f64], t0: f64, settings: NewtonSettings) -> Result<NewtonOutcome> {
    let rf = ReducedFucik { op, p };
    let n = op.reduced_dim();
    let mut c = start.to_vec();
    let mut t = t0;
    let (mut f, mut g) = residual(&rf, &c, t);
    let mut res = merit(&f, g);
    let a = op.dense();
    let mut iterations = 0;
    while res > settings.tol && iterations < settings.max_iter {
        iterations += 1;
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        let jb = &a - masked_gram(op, &c) * p;
        jac.view_mut((0, 0), (n, n)).copy_from(&jb);
        for i in 0..n {
            jac[(i, i)] -= t;
            jac[(i, n)] = -c[i];
            jac[(n, i)] = -c[i];
        }
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            rhs[i] = -f[i];
        }
        rhs[n] = -g;
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(FucikError::Singular);
        };
        // damped step: halve until the residual decreases
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(x, d)| x + lambda * d).collect();
            let tt = t + lambda * step[n];
            let (ft, gt) = residual(&rf, &trial, tt);
            let rt = merit(&ft, gt);
            if rt < res {
                c = trial;
                t = tt;
                f = ft;
                g = gt;
                res = rt;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    // report the residual of the equation itself on the normalized iterate
    if iterations > 0 {
        let nc = norm(&c);
        for x in &mut c {
            *x /= nc;
        }
    }
    let t_final = rf.energy(&c);
    let (f, _) = residual(&rf, &c, t_final);
    let fres = norm(&f);
    if fres > settings.tol.max(1e-10) {
        return Err(FucikError::NewtonStalled { residual: fres, iterations });
    }
    Ok(NewtonOutcome { coords: c, t: t_final, residual: fres, iterations })
}
