//! Small dense and tridiagonal symmetric eigensolvers plus a pivoted
//! tridiagonal LU used by inverse iteration and the Newton solvers.

use nalgebra::DMatrix;

use crate::error::{FucikError, Result};

/// Implicit-shift QL sweeps allowed per eigenvalue.
pub const QL_SWEEPS: usize = 30;

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off` (`off[i]` couples `i` and `i+1`).
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_SWEEPS {
                return Err(FucikError::EigenNoConvergence(QL_SWEEPS));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// LU factorization with partial pivoting of a general tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// Factors the matrix with sub-diagonal `lower`, diagonal `diag` and
    /// super-diagonal `upper`. Exactly zero pivots are an error.
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let lu = Self::factor(lower, diag, upper, 0.0);
        if lu.d.iter().any(|&p| p == 0.0 || !p.is_finite()) {
            return Err(FucikError::Singular);
        }
        Ok(lu)
    }

    /// Like [`TridiagonalLu::new`], but zero pivots are replaced by `floor`
    /// (inverse iteration factors matrices that are singular on purpose).
    pub fn new_regularized(lower: &[f64], diag: &[f64], upper: &[f64], floor: f64) -> Self {
        Self::factor(lower, diag, upper, floor)
    }

    fn factor(lower: &[f64], diag: &[f64], upper: &[f64], floor: f64) -> Self {
        let n = diag.len();
        let mut dl = lower.to_vec();
        let mut d = diag.to_vec();
        let mut du = upper.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = floor;
                }
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = floor;
        }
        Self { dl, d, du, du2, swapped }
    }

    pub fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if !self.swapped[i] {
                b[i + 1] -= self.dl[i] * b[i];
            } else {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            }
        }
        if n == 0 {
            return;
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Eigenvectors for the given (ascending) eigenvalues by inverse iteration,
/// orthogonalized within clusters of nearly equal eigenvalues.
pub fn tridiagonal_eigenvectors(diag: &[f64], off: &[f64], values: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let scale = diag.iter().chain(off).fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (k, &lambda) in values.iter().enumerate() {
        let shifted: Vec<f64> = diag.iter().map(|d| d - lambda).collect();
        let lu = TridiagonalLu::new_regularized(off, &shifted, off, f64::EPSILON * scale);
        // deterministic start that is not orthogonal to any eigenvector generically
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i * 7919 + k * 104729) % 997) as f64 / 997.0).collect();
        let cluster: Vec<usize> = (0..k).filter(|&j| (values[j] - lambda).abs() < 1e-8 * scale).collect();
        for _ in 0..4 {
            for &j in &cluster {
                let c: f64 = out[j].iter().zip(&x).map(|(a, b)| a * b).sum();
                for (xi, oj) in x.iter_mut().zip(&out[j]) {
                    *xi -= c * oj;
                }
            }
            lu.solve(&mut x);
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut x {
                *v /= nrm;
            }
        }
        for &j in &cluster {
            let c: f64 = out[j].iter().zip(&x).map(|(a, b)| a * b).sum();
            for (xi, oj) in x.iter_mut().zip(&out[j]) {
                *xi -= c * oj;
            }
        }
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut x {
            *v /= nrm;
        }
        out.push(x);
    }
    out
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
/// Returns ascending eigenvalues and the matching eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let cap = 30 * n * n;
    let fro = m.norm().max(1.0);
    let mut rotations = 0;
    loop {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= 1e-12 * fro {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                if rotations >= cap {
                    return Err(FucikError::EigenNoConvergence(cap));
                }
                rotations += 1;
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}
