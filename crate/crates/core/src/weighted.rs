//! Functions of the Gaussian-weighted space, sampled in the transformed
//! variable `v = e^{|x|²/8} u`.
//!
//! A [`FieldSample`] stores `U_i = √w_i · v(x_i)`, so the `L²_K` pairing is a
//! plain dot product and positive parts are taken sample by sample.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{FucikError, Result};
use crate::hermite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Hermite-function Galerkin basis on an oversampled uniform grid.
    Spectral,
    /// Second-order central differences, Dirichlet at both ends. N = 1 only.
    FiniteDifference,
    /// Plain coordinates with unit weights, for small explicit matrices.
    Euclidean,
}

impl std::str::FromStr for Backend {
    type Err = FucikError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Backend::Spectral),
            "fd" | "finite-difference" => Ok(Backend::FiniteDifference),
            "euclidean" => Ok(Backend::Euclidean),
            other => Err(FucikError::InvalidArgument(format!("unknown backend `{other}`"))),
        }
    }
}

/// Sampled Hermite basis: `matrix[(i, j)] = √w_i · ψ_j(x_i)`.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    pub matrix: DMatrix<f64>,
    pub levels: Vec<f64>,
    pub degrees: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Discretization {
    dimension: usize,
    backend: Backend,
    cutoff: usize,
    radius: f64,
    sample_radius: f64,
    spacing: f64,
    center: f64,
    axis: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scale: Vec<f64>,
    basis: Option<SpectralBasis>,
}

/// Truncation requirement on the domain radius.
pub const TRUNCATION_TOL: f64 = 1e-7;

const SPECTRAL_SPACING_1D: f64 = 0.05;
const SPECTRAL_SPACING_2D: f64 = 0.2;
// margin past the outermost turning point so the top mode has decayed below round-off
const SPECTRAL_TAIL: f64 = 8.0;

impl Discretization {
    pub fn new(dimension: usize, backend: Backend, cutoff: usize, radius: f64) -> Result<Arc<Self>> {
        match backend {
            Backend::Spectral => Self::spectral(dimension, cutoff, radius),
            Backend::FiniteDifference => {
                if dimension != 1 {
                    return Err(FucikError::Unsupported("finite differences are implemented for N = 1 only".into()));
                }
                Self::finite_difference(cutoff, radius, 0.0)
            }
            Backend::Euclidean => Self::euclidean(cutoff),
        }
    }

    fn check_radius(radius: f64) -> Result<()> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(FucikError::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        if (-radius * radius / 8.0).exp() >= TRUNCATION_TOL {
            return Err(FucikError::InvalidArgument(format!(
                "radius {radius} too small: e^(-R²/8) must be below {TRUNCATION_TOL:e}"
            )));
        }
        Ok(())
    }

    fn spectral(dimension: usize, cutoff: usize, radius: f64) -> Result<Arc<Self>> {
        if dimension != 1 && dimension != 2 {
            return Err(FucikError::Unsupported(format!("dimension {dimension}")));
        }
        if cutoff < 2 {
            return Err(FucikError::InvalidArgument(
                "cutoff must be at least 2 to hold the ground state and a sign-changing mode".into(),
            ));
        }
        Self::check_radius(radius)?;
        let top = cutoff - 1;
        let sample_radius = radius.max(hermite::turning_point(top) + SPECTRAL_TAIL);
        let base = if dimension == 1 { SPECTRAL_SPACING_1D } else { SPECTRAL_SPACING_2D };
        // at least four samples per shortest local wavelength
        let wavenumber = hermite::level_1d(top).sqrt();
        let target = base.min(std::f64::consts::PI / (2.0 * wavenumber));
        let half = (sample_radius / target).ceil() as usize;
        let spacing = sample_radius / half as f64;
        let axis: Vec<f64> = (0..=2 * half).map(|i| (i as f64 - half as f64) * spacing).collect();
        let mut axis_w = vec![spacing; axis.len()];
        axis_w[0] *= 0.5;
        *axis_w.last_mut().unwrap() *= 0.5;

        let axis_vals: Vec<Vec<f64>> = axis.iter().map(|&x| hermite::hermite_functions(cutoff, x)).collect();

        let mut modes: Vec<Vec<usize>> = if dimension == 1 {
            (0..cutoff).map(|k| vec![k]).collect()
        } else {
            let mut m = Vec::with_capacity(cutoff * cutoff);
            for i in 0..cutoff {
                for j in 0..cutoff {
                    m.push(vec![i, j]);
                }
            }
            m
        };
        modes.sort_by_key(|d| (d.iter().sum::<usize>(), d.clone()));
        let levels: Vec<f64> =
            modes.iter().map(|d| d.iter().sum::<usize>() as f64 / 2.0 + dimension as f64 / 2.0).collect();

        let (nodes, weights, matrix) = if dimension == 1 {
            let nodes = axis.clone();
            let weights = axis_w.clone();
            let matrix =
                DMatrix::from_fn(axis.len(), modes.len(), |i, j| weights[i].sqrt() * axis_vals[i][modes[j][0]]);
            (nodes, weights, matrix)
        } else {
            let m = axis.len();
            let mut nodes = Vec::with_capacity(2 * m * m);
            let mut weights = Vec::with_capacity(m * m);
            for a in 0..m {
                for b in 0..m {
                    nodes.push(axis[a]);
                    nodes.push(axis[b]);
                    weights.push(axis_w[a] * axis_w[b]);
                }
            }
            let matrix = DMatrix::from_fn(m * m, modes.len(), |i, j| {
                let (a, b) = (i / m, i % m);
                weights[i].sqrt() * axis_vals[a][modes[j][0]] * axis_vals[b][modes[j][1]]
            });
            (nodes, weights, matrix)
        };
        let scale = scale_factors(&nodes, &weights, dimension);
        Ok(Arc::new(Self {
            dimension,
            backend: Backend::Spectral,
            cutoff,
            radius,
            sample_radius,
            spacing,
            center: 0.0,
            axis,
            nodes,
            weights,
            scale,
            basis: Some(SpectralBasis { matrix, levels, degrees: modes }),
        }))
    }

    /// Uniform grid of `count` nodes spanning `[center - R, center + R]`.
    pub fn finite_difference(count: usize, radius: f64, center: f64) -> Result<Arc<Self>> {
        if count < 5 {
            return Err(FucikError::InvalidArgument("finite differences need at least 5 nodes".into()));
        }
        Self::check_radius(radius)?;
        let spacing = 2.0 * radius / (count - 1) as f64;
        let mid = (count - 1) as f64 / 2.0;
        let nodes: Vec<f64> = (0..count).map(|i| center + (i as f64 - mid) * spacing).collect();
        let weights = vec![spacing; count];
        let scale = scale_factors(&nodes, &weights, 1);
        Ok(Arc::new(Self {
            dimension: 1,
            backend: Backend::FiniteDifference,
            cutoff: count,
            radius,
            sample_radius: radius,
            spacing,
            center,
            axis: nodes.clone(),
            nodes,
            weights,
            scale,
            basis: None,
        }))
    }

    /// Coordinate space `R^n` with unit weights.
    pub fn euclidean(n: usize) -> Result<Arc<Self>> {
        if n < 2 {
            return Err(FucikError::InvalidArgument("need at least two coordinates".into()));
        }
        let nodes: Vec<f64> = (0..n).map(|i| i as f64).collect();
        Ok(Arc::new(Self {
            dimension: 1,
            backend: Backend::Euclidean,
            cutoff: n,
            radius: 0.0,
            sample_radius: 0.0,
            spacing: 1.0,
            center: 0.0,
            axis: nodes.clone(),
            nodes,
            weights: vec![1.0; n],
            scale: vec![1.0; n],
            basis: None,
        }))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn backend(&self) -> Backend {
        self.backend
    }
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    /// Half-width actually covered by samples (spectral grids may extend past R).
    pub fn sample_radius(&self) -> f64 {
        self.sample_radius
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn center(&self) -> f64 {
        self.center
    }
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dimension..(i + 1) * self.dimension]
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// `√w_i · e^{|x_i|²/8}`: maps original values `u(x_i)` to stored samples.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }
    pub fn basis(&self) -> Option<&SpectralBasis> {
        self.basis.as_ref()
    }

    pub fn compatible(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.backend == other.backend
                && self.dimension == other.dimension
                && self.cutoff == other.cutoff
                && self.len() == other.len()
                && self.spacing == other.spacing
                && self.center == other.center
                && self.sample_radius == other.sample_radius)
    }

    /// Largest entry of `|BᵀB − I|` for the spectral basis; zero otherwise.
    pub fn gram_error(&self) -> f64 {
        match &self.basis {
            None => 0.0,
            Some(b) => {
                let g = b.matrix.transpose() * &b.matrix;
                let mut worst: f64 = 0.0;
                for i in 0..g.nrows() {
                    for j in 0..g.ncols() {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((g[(i, j)] - target).abs());
                    }
                }
                worst
            }
        }
    }
}

fn scale_factors(nodes: &[f64], weights: &[f64], dimension: usize) -> Vec<f64> {
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let r2: f64 = nodes[i * dimension..(i + 1) * dimension].iter().map(|x| x * x).sum();
            w.sqrt() * (r2 / 8.0).exp()
        })
        .collect()
}

/// A sampled function of the weighted space.
#[derive(Clone, Debug)]
pub struct FieldSample {
    values: Vec<f64>,
    disc: Arc<Discretization>,
}

impl FieldSample {
    pub fn new(disc: &Arc<Discretization>, values: Vec<f64>) -> Result<Self> {
        if values.len() != disc.len() {
            return Err(FucikError::InvalidArgument(format!("expected {} samples, got {}", disc.len(), values.len())));
        }
        Ok(Self { values, disc: disc.clone() })
    }

    pub fn zeros(disc: &Arc<Discretization>) -> Self {
        Self { values: vec![0.0; disc.len()], disc: disc.clone() }
    }

    /// Samples an original-variable function `u(x)`.
    pub fn from_fn(disc: &Arc<Discretization>, u: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..disc.len()).map(|i| disc.scale[i] * u(disc.node(i))).collect();
        Self { values, disc: disc.clone() }
    }

    /// Samples a transformed-variable function `v(x) = e^{|x|²/8} u(x)`.
    pub fn from_transformed_fn(disc: &Arc<Discretization>, v: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..disc.len()).map(|i| disc.weights[i].sqrt() * v(disc.node(i))).collect();
        Self { values, disc: disc.clone() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn disc(&self) -> &Arc<Discretization> {
        &self.disc
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Original-variable values `u(x_i)`.
    pub fn original_values(&self) -> Vec<f64> {
        self.values.iter().zip(&self.disc.scale).map(|(v, s)| v / s).collect()
    }

    /// Transformed-variable values `v(x_i)`.
    pub fn transformed_values(&self) -> Vec<f64> {
        self.values.iter().zip(&self.disc.weights).map(|(v, w)| v / w.sqrt()).collect()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { values, disc: self.disc.clone() }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.with_values(self.values.iter().map(|v| a * v).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &FieldSample, b: f64) -> Result<Self> {
        check(self, other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect()))
    }

    pub fn norm_k(&self) -> f64 {
        dot(&self.values, &self.values).sqrt()
    }

    pub fn positive_part(&self) -> Self {
        self.with_values(self.values.iter().map(|v| v.max(0.0)).collect())
    }

    pub fn negative_part(&self) -> Self {
        self.with_values(self.values.iter().map(|v| (-v).max(0.0)).collect())
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn changes_sign(&self) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = 1e-8 * scale;
        self.values.iter().any(|&v| v > floor) && self.values.iter().any(|&v| v < -floor)
    }

    pub fn sphere_project(&self) -> Result<SpherePoint> {
        let n = self.norm_k();
        if !(n > 0.0) || !n.is_finite() {
            return Err(FucikError::ZeroField);
        }
        Ok(SpherePoint(self.scaled(1.0 / n)))
    }
}

fn check(u: &FieldSample, v: &FieldSample) -> Result<()> {
    if u.disc.compatible(&v.disc) && u.values.len() == v.values.len() {
        Ok(())
    } else {
        Err(FucikError::DiscretizationMismatch)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Unit vector of the `L²_K` sphere.
#[derive(Clone, Debug)]
pub struct SpherePoint(FieldSample);

impl SpherePoint {
    pub fn field(&self) -> &FieldSample {
        &self.0
    }
    pub fn into_field(self) -> FieldSample {
        self.0
    }
    pub fn neg(&self) -> SpherePoint {
        SpherePoint(self.0.scaled(-1.0))
    }
    /// Wraps samples already known to have unit norm.
    pub(crate) fn assume_unit(u: FieldSample) -> Self {
        SpherePoint(u)
    }
}

impl std::ops::Deref for SpherePoint {
    type Target = FieldSample;
    fn deref(&self) -> &FieldSample {
        &self.0
    }
}

pub fn inner_product_k(u: &FieldSample, v: &FieldSample) -> Result<f64> {
    check(u, v)?;
    Ok(dot(&u.values, &v.values))
}

pub fn positive_part(u: &FieldSample) -> FieldSample {
    u.positive_part()
}

pub fn negative_part(u: &FieldSample) -> FieldSample {
    u.negative_part()
}

pub fn sphere_project(u: &FieldSample) -> Result<SpherePoint> {
    u.sphere_project()
}

/// `‖u‖² = uᵀAu`, the squared norm of the energy space.
pub fn x_seminorm_sq(u: &FieldSample, op: &crate::operator::DiscreteOperator) -> Result<f64> {
    op.quadratic(u)
}
