//! Checks on a traced curve: Lipschitz bound, monotonicity, decay towards
//! `λ₁`, and a sampled search for Fučik points below the curve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::minimax::newton::{self, NewtonSettings};
use crate::minimax::{CurvePoint, CurveTrace};
use crate::operator::DiscreteOperator;
use crate::weighted::norm;

pub const LIPSCHITZ_SLACK: f64 = 1e-4;
pub const MONOTONE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub applicable: bool,
    pub passed: bool,
    /// Largest violation margin (negative when every pair passes with room).
    pub worst: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub levels: usize,
    pub starts: usize,
    /// Levels are drawn from `(λ₁, c − margin)`.
    pub margin: f64,
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { levels: 20, starts: 50, margin: 0.05, residual_tol: 1e-8, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeReport {
    pub p: f64,
    pub c: f64,
    pub lambda1: f64,
    pub levels: Vec<f64>,
    pub attempts: usize,
    /// Newton runs that reached the residual tolerance.
    pub converged: usize,
    /// Converged runs that landed on a sign-changing solution below `c − margin`.
    pub violations: Vec<f64>,
    pub applicable: bool,
    pub passed: bool,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveReport {
    pub lambda1: f64,
    pub lipschitz: Check,
    pub monotone: Check,
    pub asymptote: Check,
    pub probes: Vec<ProbeReport>,
    pub passed: bool,
}

fn lipschitz(points: &[CurvePoint]) -> Check {
    let mut worst = f64::NEG_INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            worst = worst.max((a.c - b.c).abs() - (a.p - b.p).abs() - LIPSCHITZ_SLACK);
        }
    }
    let applicable = points.len() >= 2;
    Check {
        name: "lipschitz".into(),
        applicable,
        passed: !applicable || worst <= 0.0,
        worst: if applicable { worst } else { 0.0 },
        detail: format!("|Δc| ≤ |Δp| + {LIPSCHITZ_SLACK:e} over all pairs"),
    }
}

fn monotone(points: &[CurvePoint]) -> Check {
    let mut worst = f64::NEG_INFINITY;
    for w in points.windows(2) {
        worst = worst.max(w[1].c - w[0].c);
        worst = worst.max(w[0].alpha() - w[1].alpha());
    }
    let applicable = points.len() >= 2;
    Check {
        name: "monotone".into(),
        applicable,
        passed: !applicable || worst < MONOTONE_TOL,
        worst: if applicable { worst } else { 0.0 },
        detail: format!("c decreasing and p + c increasing, up to {MONOTONE_TOL:e}"),
    }
}

fn asymptote(points: &[CurvePoint], lambda1: f64) -> Check {
    let applicable = points.len() >= 2 && points[0].p <= 0.0 && points[points.len() - 1].p >= 20.0;
    let mut worst = f64::NEG_INFINITY;
    let mut ratio = f64::NAN;
    if applicable {
        for w in points.windows(2) {
            worst = worst.max(w[1].c - w[0].c);
        }
        let first = points[0].c - lambda1;
        let last = points[points.len() - 1].c - lambda1;
        ratio = first / last.max(f64::MIN_POSITIVE);
        worst = worst.max(last - first / 5.0);
    }
    Check {
        name: "asymptote".into(),
        applicable,
        passed: !applicable || worst < MONOTONE_TOL,
        worst: if applicable { worst } else { 0.0 },
        detail: if applicable {
            format!("c − λ₁ decreasing up to {MONOTONE_TOL:e}; first/last gap ratio {ratio:.3e} (needs ≥ 5)")
        } else {
            "grid does not span [0, 20]".into()
        },
    }
}

/// Searches for sign-changing Fučik points `(p + β, β)` with `β` below the
/// curve. The search samples random starts, so a clean result is evidence,
/// not proof.
pub fn minimality_probe(point: &CurvePoint, op: &DiscreteOperator, lambda1: f64, cfg: &ProbeConfig) -> ProbeReport {
    let hi = point.c - cfg.margin;
    let applicable = hi > lambda1;
    let levels: Vec<f64> = if applicable {
        (1..=cfg.levels).map(|i| lambda1 + (hi - lambda1) * i as f64 / (cfg.levels + 1) as f64).collect()
    } else {
        Vec::new()
    };
    let n = op.reduced_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut attempts = 0;
    let mut converged = 0;
    let mut violations = Vec::new();
    let settings = NewtonSettings { tol: 1e-12, max_iter: 50 };
    for &beta in &levels {
        for _ in 0..cfg.starts {
            let start = loop {
                let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let nv = norm(&v);
                let v: Vec<f64> = v.into_iter().map(|x| x / nv).collect();
                if changes_sign(&op.from_coords(&v)) {
                    break v;
                }
            };
            attempts += 1;
            let Ok(out) = newton::solve(op, point.p, &start, beta, settings) else {
                continue;
            };
            if out.residual >= cfg.residual_tol {
                continue;
            }
            converged += 1;
            if changes_sign(&op.from_coords(&out.coords)) && out.t < hi {
                violations.push(out.t);
            }
        }
    }
    ProbeReport {
        p: point.p,
        c: point.c,
        lambda1,
        levels,
        attempts,
        converged,
        passed: violations.is_empty(),
        violations,
        applicable,
        note: "non-exhaustive: random starts can miss solutions".into(),
    }
}

fn changes_sign(v: &[f64]) -> bool {
    let max = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let floor = 1e-8 * max;
    v.iter().any(|&x| x > floor) && v.iter().any(|&x| x < -floor)
}

/// Runs checks (a)–(c) on every point and the minimality probe on the points
/// at indices `probe_at`.
pub fn verify_curve_properties(
    trace: &CurveTrace,
    op: &DiscreteOperator,
    probe_at: &[usize],
    cfg: &ProbeConfig,
) -> Result<CurveReport> {
    let lambda1 = trace.lambda1;
    let pts = &trace.points;
    let lipschitz = lipschitz(pts);
    let monotone = monotone(pts);
    let asymptote = asymptote(pts, lambda1);
    let probes: Vec<ProbeReport> =
        probe_at.iter().filter_map(|&i| pts.get(i)).map(|pt| minimality_probe(pt, op, lambda1, cfg)).collect();
    let passed = lipschitz.passed && monotone.passed && asymptote.passed && probes.iter().all(|p| p.passed);
    Ok(CurveReport { lambda1, lipschitz, monotone, asymptote, probes, passed })
}
