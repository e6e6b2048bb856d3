//! Discrete realizations of the form `a(u,v) = ∫∇u·∇v K dx`.
//!
//! Every backend works in an `L²_K`-orthonormal frame, so the mass matrix is
//! the identity. The spectral backend is a Galerkin method: its matrix is
//! diagonal in Hermite coefficients, and sample vectors are mapped to and from
//! coefficients through the sampled basis `B` (columns orthonormal).

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{FucikError, Result};
use crate::weighted::{Backend, Discretization, FieldSample, SpherePoint};

#[derive(Clone, Debug)]
pub enum OperatorMatrix {
    Diagonal(Vec<f64>),
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
    Dense(DMatrix<f64>),
}

#[derive(Debug)]
pub struct DiscreteOperator {
    matrix: OperatorMatrix,
    disc: Arc<Discretization>,
    ground: OnceLock<(f64, Vec<f64>)>,
}

impl Clone for DiscreteOperator {
    fn clone(&self) -> Self {
        Self { matrix: self.matrix.clone(), disc: self.disc.clone(), ground: OnceLock::new() }
    }
}

impl DiscreteOperator {
    pub fn assemble(disc: &Arc<Discretization>) -> Result<Self> {
        let matrix = match disc.backend() {
            Backend::Spectral => {
                OperatorMatrix::Diagonal(disc.basis().expect("spectral grids carry a basis").levels.clone())
            }
            Backend::FiniteDifference => {
                let h = disc.spacing();
                let n = disc.len();
                let shift = disc.dimension() as f64 / 4.0;
                let diag = (0..n)
                    .map(|i| {
                        let x = disc.node(i)[0];
                        2.0 / (h * h) + x * x / 16.0 + shift
                    })
                    .collect();
                OperatorMatrix::Tridiagonal { diag, off: vec![-1.0 / (h * h); n - 1] }
            }
            Backend::Euclidean => {
                return Err(FucikError::InvalidArgument(
                    "coordinate spaces carry explicit matrices; use from_matrix".into(),
                ))
            }
        };
        Ok(Self { matrix, disc: disc.clone(), ground: OnceLock::new() })
    }

    /// Operator given by an explicit symmetric matrix on `R^n`.
    pub fn from_matrix(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(FucikError::InvalidArgument("matrix must be square".into()));
        }
        let asym = (&a - a.transpose()).amax();
        if asym > 1e-12 * a.amax().max(1.0) {
            return Err(FucikError::InvalidArgument("matrix must be symmetric".into()));
        }
        let disc = Discretization::euclidean(a.nrows())?;
        Ok(Self { matrix: OperatorMatrix::Dense(a), disc, ground: OnceLock::new() })
    }

    pub fn disc(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    /// Dimension of the coordinate space the matrix acts on.
    pub fn reduced_dim(&self) -> usize {
        match &self.matrix {
            OperatorMatrix::Diagonal(d) => d.len(),
            OperatorMatrix::Tridiagonal { diag, .. } => diag.len(),
            OperatorMatrix::Dense(a) => a.nrows(),
        }
    }

    fn spectral_basis(&self) -> Option<&DMatrix<f64>> {
        match self.matrix {
            OperatorMatrix::Diagonal(_) => self.disc.basis().map(|b| &b.matrix),
            _ => None,
        }
    }

    /// Sample vector to coordinates (`Bᵀ U` for the spectral basis).
    pub fn to_coords(&self, samples: &[f64]) -> Vec<f64> {
        match self.spectral_basis() {
            Some(b) => b.tr_mul(&DVector::from_column_slice(samples)).as_slice().to_vec(),
            None => samples.to_vec(),
        }
    }

    /// Coordinates to sample vector (`B c` for the spectral basis).
    pub fn from_coords(&self, coords: &[f64]) -> Vec<f64> {
        match self.spectral_basis() {
            Some(b) => (b * DVector::from_column_slice(coords)).as_slice().to_vec(),
            None => coords.to_vec(),
        }
    }

    /// Matrix-vector product in coordinates.
    pub fn mul_coords(&self, c: &[f64]) -> Vec<f64> {
        match &self.matrix {
            OperatorMatrix::Diagonal(d) => d.iter().zip(c).map(|(a, b)| a * b).collect(),
            OperatorMatrix::Tridiagonal { diag, off } => {
                let n = diag.len();
                (0..n)
                    .map(|i| {
                        let mut s = diag[i] * c[i];
                        if i > 0 {
                            s += off[i - 1] * c[i - 1];
                        }
                        if i + 1 < n {
                            s += off[i] * c[i + 1];
                        }
                        s
                    })
                    .collect()
            }
            OperatorMatrix::Dense(a) => (a * DVector::from_column_slice(c)).as_slice().to_vec(),
        }
    }

    /// Dense copy of the coordinate matrix.
    pub fn dense(&self) -> DMatrix<f64> {
        match &self.matrix {
            OperatorMatrix::Diagonal(d) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            OperatorMatrix::Tridiagonal { diag, off } => {
                let n = diag.len();
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = diag[i];
                    if i + 1 < n {
                        m[(i, i + 1)] = off[i];
                        m[(i + 1, i)] = off[i];
                    }
                }
                m
            }
            OperatorMatrix::Dense(a) => a.clone(),
        }
    }

    fn check(&self, u: &FieldSample) -> Result<()> {
        if self.disc.compatible(u.disc()) {
            Ok(())
        } else {
            Err(FucikError::DiscretizationMismatch)
        }
    }

    pub fn apply(&self, u: &FieldSample) -> Result<FieldSample> {
        self.check(u)?;
        let c = self.to_coords(u.values());
        Ok(u.with_values(self.from_coords(&self.mul_coords(&c))))
    }

    /// Orthogonal projection onto the discrete space (identity unless spectral).
    pub fn project(&self, u: &FieldSample) -> Result<FieldSample> {
        self.check(u)?;
        if self.spectral_basis().is_none() {
            return Ok(u.clone());
        }
        Ok(u.with_values(self.from_coords(&self.to_coords(u.values()))))
    }

    pub fn quadratic(&self, u: &FieldSample) -> Result<f64> {
        self.check(u)?;
        let c = self.to_coords(u.values());
        Ok(crate::weighted::dot(&c, &self.mul_coords(&c)))
    }

    /// Gershgorin upper bound on the spectrum.
    pub fn spectral_bound(&self) -> f64 {
        match &self.matrix {
            OperatorMatrix::Diagonal(d) => d.iter().cloned().fold(f64::MIN, f64::max),
            OperatorMatrix::Tridiagonal { diag, off } => {
                let n = diag.len();
                (0..n)
                    .map(|i| {
                        let mut r = diag[i];
                        if i > 0 {
                            r += off[i - 1].abs();
                        }
                        if i + 1 < n {
                            r += off[i].abs();
                        }
                        r
                    })
                    .fold(f64::MIN, f64::max)
            }
            OperatorMatrix::Dense(a) => {
                (0..a.nrows()).map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(f64::MIN, f64::max)
            }
        }
    }

    pub fn symmetry_defect(&self) -> f64 {
        match &self.matrix {
            OperatorMatrix::Diagonal(_) | OperatorMatrix::Tridiagonal { .. } => 0.0,
            OperatorMatrix::Dense(a) => (a - a.transpose()).amax(),
        }
    }

    /// Smallest eigenvalue and its normalized, positive eigenvector (cached).
    pub fn ground_state(&self) -> Result<(f64, SpherePoint)> {
        if let Some((l, v)) = self.ground.get() {
            return Ok((*l, SpherePoint::assume_unit(FieldSample::new(&self.disc, v.clone())?)));
        }
        let es = self.eigensystem(1)?;
        let l = es.eigenvalues[0];
        let v = es.eigenvectors[0].values().to_vec();
        let _ = self.ground.set((l, v.clone()));
        Ok((l, SpherePoint::assume_unit(FieldSample::new(&self.disc, v)?)))
    }

    pub fn eigensystem(&self, count: usize) -> Result<EigenSystem> {
        let n = self.reduced_dim();
        if count == 0 || count > n {
            return Err(FucikError::InvalidArgument(format!("count must lie in 1..={n}, got {count}")));
        }
        let (values, vectors): (Vec<f64>, Vec<Vec<f64>>) = match &self.matrix {
            OperatorMatrix::Diagonal(d) => {
                let mut order: Vec<usize> = (0..d.len()).collect();
                order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
                order
                    .into_iter()
                    .take(count)
                    .map(|i| {
                        let mut e = vec![0.0; n];
                        e[i] = 1.0;
                        (d[i], self.from_coords(&e))
                    })
                    .unzip()
            }
            OperatorMatrix::Tridiagonal { diag, off } => {
                let all = eigen::tridiagonal_eigenvalues(diag, off)?;
                let vals = all[..count].to_vec();
                let vecs = eigen::tridiagonal_eigenvectors(diag, off, &vals);
                (vals, vecs)
            }
            OperatorMatrix::Dense(a) => {
                let (vals, vecs) = eigen::jacobi_eigen(a)?;
                (vals[..count].to_vec(), (0..count).map(|k| vecs.column(k).as_slice().to_vec()).collect())
            }
        };
        let eigenvectors = vectors
            .into_iter()
            .map(|mut v| {
                fix_sign(&mut v);
                FieldSample::new(&self.disc, v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EigenSystem { eigenvalues: values, eigenvectors })
    }
}

/// Sign convention: the first entry that is not negligible is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * max) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<FieldSample>,
}

impl EigenSystem {
    pub fn max_residual(&self, op: &DiscreteOperator) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let r = op.apply(v)?.combine(1.0, v, -l)?;
            worst = worst.max(r.norm_k());
        }
        Ok(worst)
    }

    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate() {
                let d = crate::weighted::dot(a.values(), b.values());
                worst = worst.max((d - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Eigenvalues `(N + k − 1)/2`, `k = 1..=kmax`, with multiplicity `C(N+k−2, N−1)`.
pub fn closed_form_spectrum(dimension: usize, kmax: usize) -> Vec<(f64, usize)> {
    (1..=kmax).map(|k| ((dimension + k - 1) as f64 / 2.0, binomial(dimension + k - 2, dimension - 1))).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub expected: f64,
    pub computed: Vec<f64>,
    pub expected_multiplicity: usize,
    pub multiplicity: usize,
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub dimension: usize,
    pub tol: f64,
    pub levels: Vec<LevelCheck>,
    pub max_error: f64,
    pub passed: bool,
}

/// Clusters the computed eigenvalues (gap threshold `10·tol`) and compares
/// them level by level with the closed form. A final cluster cut short by
/// the eigenvalue count is not judged.
pub fn verify_spectrum(es: &EigenSystem, dimension: usize, tol: f64) -> SpectrumReport {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &v in &es.eigenvalues {
        match clusters.last_mut() {
            Some(c) if (v - c.last().unwrap()).abs() <= 10.0 * tol => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }
    let exact = closed_form_spectrum(dimension, clusters.len().max(1));
    let mut levels = Vec::new();
    let mut passed = !clusters.is_empty();
    let mut max_error: f64 = 0.0;
    let count = clusters.len();
    for (i, (cluster, (value, mult))) in clusters.into_iter().zip(exact).enumerate() {
        if i + 1 == count && count > 1 && cluster.len() < mult {
            break;
        }
        let err = cluster.iter().fold(0.0f64, |m, v| m.max((v - value).abs()));
        max_error = max_error.max(err);
        if err > tol || cluster.len() != mult {
            passed = false;
        }
        levels.push(LevelCheck {
            level: i + 1,
            expected: value,
            expected_multiplicity: mult,
            multiplicity: cluster.len(),
            computed: cluster,
            max_error: err,
        });
    }
    SpectrumReport { dimension, tol, levels, max_error, passed }
}

/// Number of eigenvalues in the first `kmax` closed-form levels.
pub fn count_through_level(dimension: usize, kmax: usize) -> usize {
    closed_form_spectrum(dimension, kmax).iter().map(|(_, m)| m).sum()
}
