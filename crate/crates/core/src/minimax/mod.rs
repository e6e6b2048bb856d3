//! First nontrivial Fučik curve: minimax over paths joining `−φ̂₁` to `φ̂₁`,
//! semismooth Newton refinement, curve tracing and property checks.

pub mod cdg;
pub mod engine;
pub mod newton;
pub mod oracle;
pub mod properties;

use serde::{Deserialize, Serialize};

use crate::error::{FucikError, Result};
use crate::functional::{FucikPoint, ReducedFucik};
use crate::operator::DiscreteOperator;
use crate::weighted::{dot, norm, FieldSample, SpherePoint};
use engine::{DeformOptions, Deformation, Landscape};
use newton::NewtonSettings;

pub use cdg::{align_on_fd_grid, cdg_path_energy, AlignedPoint, CdgReport};
pub use oracle::{dense_scan_oracle, minimal_level_above};
pub use properties::{minimality_probe, verify_curve_properties, CurveReport, ProbeConfig, ProbeReport};

/// Middle direction of the initial path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuxDirection {
    /// The second eigenmode.
    SecondMode,
    /// `e^{−|x|²/8} / (1 + |x|⁴)`, the slowly decaying profile used for the
    /// large-`p` behaviour. It is even, and the descent preserves parity, so
    /// on a symmetric grid the path never leaves the even functions and the
    /// pass settles on the even level (`λ₃` at `p = 0`), not on `c(p)`.
    DecayingBump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxOptions {
    pub nodes: usize,
    pub deform: DeformOptions,
    pub newton_tol: f64,
    pub aux: AuxDirection,
    pub warm_start: bool,
    /// Allowed gap between a direct solve at `−p` and the reflected value.
    pub symmetry_tol: f64,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self {
            nodes: 41,
            deform: DeformOptions::default(),
            newton_tol: 1e-10,
            aux: AuxDirection::SecondMode,
            warm_start: true,
            symmetry_tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpherePath {
    pub nodes: Vec<SpherePoint>,
}

#[derive(Clone, Debug)]
pub struct CurvePoint {
    pub p: f64,
    pub c: f64,
    pub u: SpherePoint,
    pub grad_norm: f64,
    pub residual: f64,
    pub iterations: usize,
    pub refined: bool,
}

impl CurvePoint {
    pub fn alpha(&self) -> f64 {
        self.p + self.c
    }
    pub fn beta(&self) -> f64 {
        self.c
    }
    pub fn fucik_point(&self) -> FucikPoint {
        FucikPoint::from_level(self.p, self.c)
    }
}

/// `Ĩ_p` on the unit sphere of operator coordinates.
pub(crate) struct SphereLandscape<'a> {
    pub rf: ReducedFucik<'a>,
}

impl Landscape for SphereLandscape<'_> {
    fn energy(&self, x: &[f64]) -> f64 {
        self.rf.energy(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.rf.half_gradient(x).1.into_iter().map(|v| 2.0 * v).collect()
    }
    fn stationarity(&self, x: &[f64]) -> f64 {
        norm(&self.rf.half_gradient(x).1)
    }
    fn retract(&self, x: Vec<f64>) -> Vec<f64> {
        let n = norm(&x);
        x.into_iter().map(|v| v / n).collect()
    }
    fn tangent(&self, x: &[f64], v: Vec<f64>) -> Vec<f64> {
        let c = dot(x, &v);
        v.iter().zip(x).map(|(a, b)| a - c * b).collect()
    }
}

/// Normalized ground state and auxiliary direction in operator coordinates.
fn anchors(op: &DiscreteOperator, aux: AuxDirection) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, phi) = op.ground_state()?;
    let phi_c = op.to_coords(phi.values());
    let aux_c = match aux {
        AuxDirection::SecondMode => {
            let es = op.eigensystem(2)?;
            op.to_coords(es.eigenvectors[1].values())
        }
        AuxDirection::DecayingBump => {
            let bump = FieldSample::from_transformed_fn(op.disc(), |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                1.0 / (1.0 + r2 * r2)
            });
            op.to_coords(bump.values())
        }
    };
    Ok((phi_c, aux_c))
}

fn path_coords(phi: &[f64], aux: &[f64], m: usize) -> Result<Vec<Vec<f64>>> {
    let along = dot(aux, phi);
    let perp: f64 = aux.iter().zip(phi).map(|(a, b)| (a - along * b).powi(2)).sum::<f64>().sqrt();
    if perp <= 1e-10 * norm(aux) {
        return Err(FucikError::DegeneratePath);
    }
    Ok((0..m)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (m - 1) as f64;
            let v: Vec<f64> = phi.iter().zip(aux).map(|(a, b)| t * a + (1.0 - t.abs()) * b).collect();
            let n = norm(&v);
            v.into_iter().map(|x| x / n).collect()
        })
        .collect())
}

/// `γ(t) ∝ tφ̂₁ + (1−|t|)φ` at `m` uniform values of `t ∈ [−1, 1]`.
pub fn initial_path(op: &DiscreteOperator, aux: AuxDirection, m: usize) -> Result<SpherePath> {
    if m < 5 || m.is_multiple_of(2) {
        return Err(FucikError::InvalidArgument("path needs an odd number (>= 5) of nodes".into()));
    }
    let (phi, a) = anchors(op, aux)?;
    to_sphere_path(op, &path_coords(&phi, &a, m)?)
}

/// Same as [`initial_path`] with an explicit middle direction.
pub fn initial_path_through(op: &DiscreteOperator, aux: &FieldSample, m: usize) -> Result<SpherePath> {
    if m < 5 || m.is_multiple_of(2) {
        return Err(FucikError::InvalidArgument("path needs an odd number (>= 5) of nodes".into()));
    }
    let (_, phi) = op.ground_state()?;
    let phi_c = op.to_coords(phi.values());
    to_sphere_path(op, &path_coords(&phi_c, &op.to_coords(aux.values()), m)?)
}

fn to_sphere_path(op: &DiscreteOperator, coords: &[Vec<f64>]) -> Result<SpherePath> {
    let nodes = coords
        .iter()
        .map(|c| Ok(SpherePoint::assume_unit(FieldSample::new(op.disc(), op.from_coords(c))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpherePath { nodes })
}

fn point_from_coords(
    op: &DiscreteOperator,
    p: f64,
    c: &[f64],
    grad_norm: f64,
    iterations: usize,
) -> Result<CurvePoint> {
    let u = SpherePoint::assume_unit(FieldSample::new(op.disc(), op.from_coords(c))?);
    let level = ReducedFucik { op, p }.energy(c);
    let residual = crate::functional::fucik_residual(&u, FucikPoint::from_level(p, level), op)?;
    Ok(CurvePoint { p, c: level, u, grad_norm, residual, iterations, refined: false })
}

/// Runs the deformation from an explicit starting path in coordinates.
pub fn mountain_pass_from(
    p: f64,
    op: &DiscreteOperator,
    opts: &MinimaxOptions,
    path: Vec<Vec<f64>>,
) -> Result<(CurvePoint, Deformation)> {
    let land = SphereLandscape { rf: ReducedFucik { op, p } };
    let out = engine::deform(&land, path, &opts.deform);
    if !out.converged && out.grad_norm > 100.0 * opts.deform.gtol {
        return Err(FucikError::MountainPassStalled { grad_norm: out.grad_norm, iterations: out.iterations });
    }
    let point = point_from_coords(op, p, &out.best, out.grad_norm, out.iterations)?;
    Ok((point, out))
}

/// Approximates `c(p)` by deforming the initial path; the result is unrefined.
pub fn mountain_pass_cp(p: f64, op: &DiscreteOperator, opts: &MinimaxOptions) -> Result<CurvePoint> {
    let (phi, a) = anchors(op, opts.aux)?;
    Ok(mountain_pass_from(p, op, opts, path_coords(&phi, &a, opts.nodes)?)?.0)
}

/// Semismooth Newton on `Au = (p+t)u⁺ − tu⁻`, `|u| = 1`, from a candidate.
pub fn newton_refine(candidate: &CurvePoint, op: &DiscreteOperator) -> Result<CurvePoint> {
    newton_refine_with(candidate, op, 1e-10)
}

fn newton_refine_with(candidate: &CurvePoint, op: &DiscreteOperator, tol: f64) -> Result<CurvePoint> {
    let start = op.to_coords(candidate.u.values());
    let settings = NewtonSettings { tol: 1e-12f64.min(tol), max_iter: 50 };
    let out = newton::solve(op, candidate.p, &start, candidate.c, settings)?;
    if out.residual >= tol {
        return Err(FucikError::NewtonStalled { residual: out.residual, iterations: out.iterations });
    }
    let u = if out.iterations == 0 {
        candidate.u.clone()
    } else {
        SpherePoint::assume_unit(FieldSample::new(op.disc(), op.from_coords(&out.coords))?)
    };
    let grad_norm = crate::functional::constrained_grad(&u, candidate.p, op)?.norm_k();
    Ok(CurvePoint {
        p: candidate.p,
        c: out.t,
        u,
        grad_norm,
        residual: out.residual,
        iterations: candidate.iterations + out.iterations,
        refined: true,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Gap {
    pub p: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetryCheck {
    pub p: f64,
    /// Direct solve at `p < 0`.
    pub direct: f64,
    /// `c(|p|) + |p|` from the reflection identity.
    pub reflected: f64,
    pub discrepancy: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug)]
pub struct CurveTrace {
    pub points: Vec<CurvePoint>,
    /// Parallel to `points`.
    pub sources: Vec<PointSource>,
    pub gaps: Vec<Gap>,
    pub symmetry: Vec<SymmetryCheck>,
    pub options: MinimaxOptions,
    pub lambda1: f64,
}

/// How a traced point was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSource {
    MountainPass,
    /// Newton started from the previous point of the trace, used when the
    /// deformation stalls.
    Continuation,
    /// `c(−p) = c(p) + p` with `u ↦ −u`.
    Reflection,
}

/// Mountain pass then Newton. Returns the point and the top-level path.
fn pass_and_refine(
    p: f64,
    op: &DiscreteOperator,
    opts: &MinimaxOptions,
    path: Vec<Vec<f64>>,
) -> Result<(CurvePoint, Vec<Vec<f64>>)> {
    let (cand, def) = mountain_pass_from(p, op, opts, path)?;
    let pt = newton_refine_with(&cand, op, opts.newton_tol).unwrap_or(cand);
    Ok((pt, def.path))
}

/// Newton from a nearby refined point; accepted only on a sign-changing
/// solution at a level in `[λ₁, prev.c]` (up to rounding).
fn continue_from(prev: &CurvePoint, p: f64, op: &DiscreteOperator, lambda1: f64, tol: f64) -> Result<CurvePoint> {
    let start = CurvePoint { p, iterations: 0, ..prev.clone() };
    let pt = newton_refine_with(&start, op, tol)?;
    // for large p the positive part is many orders below the negative one
    let signs = pt.u.positive_part().norm_k() > 1e-15 && pt.u.negative_part().norm_k() > 1e-15;
    if !signs || pt.c <= lambda1 - 1e-12 || pt.c > prev.c + 1e-12 {
        return Err(FucikError::NotSignChanging);
    }
    Ok(pt)
}

/// A point, the path to warm-start the next one (if any), and its origin.
type Solved = (CurvePoint, Option<Vec<Vec<f64>>>, PointSource);

struct Solver<'a> {
    op: &'a DiscreteOperator,
    opts: &'a MinimaxOptions,
    lambda1: f64,
    phi: Vec<f64>,
    aux: Vec<f64>,
}

impl Solver<'_> {
    fn cold(&self, m: usize) -> Result<Vec<Vec<f64>>> {
        path_coords(&self.phi, &self.aux, m)
    }

    /// Warm path (if any), then a cold path with about twice the nodes, then
    /// continuation from `prev`.
    fn solve(&self, p: f64, warm: Option<&Vec<Vec<f64>>>, prev: Option<&CurvePoint>) -> Result<Solved> {
        let first = match warm {
            Some(w) if self.opts.warm_start => w.clone(),
            _ => self.cold(self.opts.nodes)?,
        };
        if let Ok((pt, path)) = pass_and_refine(p, self.op, self.opts, first) {
            return Ok((pt, Some(path), PointSource::MountainPass));
        }
        let wide = MinimaxOptions { nodes: 2 * self.opts.nodes - 1, ..self.opts.clone() };
        let last_err = match pass_and_refine(p, self.op, &wide, self.cold(wide.nodes)?) {
            Ok((pt, path)) => return Ok((pt, Some(path), PointSource::MountainPass)),
            Err(e) => e,
        };
        if let Some(prev) = prev {
            if let Ok(pt) = continue_from(prev, p, self.op, self.lambda1, self.opts.newton_tol) {
                return Ok((pt, None, PointSource::Continuation));
            }
        }
        Err(last_err)
    }
}

/// Traces `p ↦ (p + c(p), c(p))` over an ascending grid.
///
/// Nonnegative `p` are solved in order, each warm-started from the previous
/// path. A negative `p` takes its value from `c(|p|) + |p|`; a direct solve
/// from a cold path is kept as a cross-check.
pub fn trace_curve(grid: &[f64], op: &DiscreteOperator, opts: &MinimaxOptions) -> Result<CurveTrace> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(FucikError::InvalidArgument("p grid must be strictly ascending".into()));
    }
    let lambda1 = op.ground_state()?.0;
    let (phi, aux) = anchors(op, opts.aux)?;
    let solver = Solver { op, opts, lambda1, phi, aux };
    let mut points = Vec::new();
    let mut sources = Vec::new();
    let mut gaps = Vec::new();
    let mut symmetry = Vec::new();
    let mut warm: Option<Vec<Vec<f64>>> = None;
    let mut prev: Option<CurvePoint> = None;
    for &p in grid.iter().filter(|&&p| p >= 0.0) {
        match solver.solve(p, warm.as_ref(), prev.as_ref()) {
            Ok((pt, path, source)) => {
                if path.is_some() {
                    warm = path;
                }
                prev = Some(pt.clone());
                points.push(pt);
                sources.push(source);
            }
            Err(e) => gaps.push(Gap { p, reason: e.to_string() }),
        }
    }
    for &p in grid.iter().filter(|&&p| p < 0.0) {
        let q = -p;
        let mirror = match points.iter().find(|pt| (pt.p - q).abs() < 1e-12) {
            Some(pt) => Ok(pt.clone()),
            None => solver.solve(q, None, None).map(|(pt, _, _)| pt),
        };
        let mirror = match mirror {
            Ok(m) => m,
            Err(e) => {
                gaps.push(Gap { p, reason: e.to_string() });
                continue;
            }
        };
        let reflected = mirror.c + q;
        let check = match solver.solve(p, None, None) {
            Ok((direct, _, _)) => {
                let discrepancy = (direct.c - reflected).abs();
                SymmetryCheck { p, direct: direct.c, reflected, discrepancy, flagged: discrepancy > opts.symmetry_tol }
            }
            Err(_) => SymmetryCheck { p, direct: f64::NAN, reflected, discrepancy: f64::NAN, flagged: true },
        };
        symmetry.push(check);
        points.push(CurvePoint { p, c: reflected, u: mirror.u.neg(), ..mirror });
        sources.push(PointSource::Reflection);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].p.total_cmp(&points[b].p));
    let points = order.iter().map(|&i| points[i].clone()).collect();
    let sources = order.iter().map(|&i| sources[i]).collect();
    symmetry.sort_by(|a, b| a.p.total_cmp(&b.p));
    Ok(CurveTrace { points, sources, gaps, symmetry, options: opts.clone(), lambda1 })
}

/// Parses `a:b:step`, a single value, or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || FucikError::InvalidArgument(format!("cannot parse p grid `{spec}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.len() {
        1 => spec.split(',').map(num).collect::<Result<Vec<_>>>()?,
        3 => {
            let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(h > 0.0) || b < a {
                return Err(bad());
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            (0..=n).map(|i| a + i as f64 * h).collect()
        }
        _ => return Err(bad()),
    };
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}
