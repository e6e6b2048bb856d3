//! Path-deformation engine shared by the Fučik minimax and the nonlinear
//! mountain pass.
//!
//! A path is a list of nodes with fixed endpoints. Each sweep moves the
//! highest interior node downhill along the gradient component normal to the
//! path, then re-equalizes the spacing. When the sweeps stall, the two path
//! segments around the max node are resampled finely and the deformation
//! continues on that local sub-path. The stalled gradient scales with the node
//! spacing, so repeated refinement drives it to zero.

use serde::{Deserialize, Serialize};

use crate::weighted::dot;

pub trait Landscape {
    fn energy(&self, x: &[f64]) -> f64;
    /// Euclidean gradient of the energy, tangent to the constraint set.
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Stationarity measure reported to callers.
    fn stationarity(&self, x: &[f64]) -> f64;
    /// Maps an ambient point back onto the constraint set.
    fn retract(&self, x: Vec<f64>) -> Vec<f64>;
    /// Projects an ambient vector onto the tangent space at `x`.
    fn tangent(&self, x: &[f64], v: Vec<f64>) -> Vec<f64>;
    /// Gradient in the landscape metric.
    fn precondition(&self, _x: &[f64], g: Vec<f64>) -> Vec<f64> {
        g
    }
    fn metric(&self, a: &[f64], b: &[f64]) -> f64 {
        dot(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformOptions {
    pub step0: f64,
    pub armijo: f64,
    pub gtol: f64,
    /// Total sweep budget across all refinement stages.
    pub max_iter: usize,
    /// Sweeps without progress in the max energy before refining.
    pub stall_window: usize,
    pub max_refinements: usize,
}

impl Default for DeformOptions {
    fn default() -> Self {
        Self { step0: 0.5, armijo: 1e-4, gtol: 1e-7, max_iter: 20_000, stall_window: 30, max_refinements: 24 }
    }
}

#[derive(Clone, Debug)]
pub struct Deformation {
    /// Top-level path after the first stage (usable as a warm start).
    pub path: Vec<Vec<f64>>,
    pub best: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub refinements: usize,
    pub converged: bool,
    /// Max node energy before each sweep; one vector per stage.
    pub history: Vec<Vec<f64>>,
}

fn metric_norm<L: Landscape>(land: &L, a: &[f64]) -> f64 {
    land.metric(a, a).max(0.0).sqrt()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - s) * x + s * y).collect()
}

/// Interior node of maximal energy; ties go to the lower index.
fn argmax_interior(energies: &[f64]) -> usize {
    let mut k = 1;
    for i in 2..energies.len() - 1 {
        if energies[i] > energies[k] {
            k = i;
        }
    }
    k
}

/// Redistributes the nodes at equal arc length along the polyline.
pub fn resample<L: Landscape>(land: &L, nodes: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    let seg: Vec<f64> = nodes.windows(2).map(|w| metric_norm(land, &diff(&w[1], &w[0]))).collect();
    let total: f64 = seg.iter().sum();
    let mut out = Vec::with_capacity(m);
    out.push(nodes[0].clone());
    let mut i = 0;
    let mut start = 0.0;
    for j in 1..m - 1 {
        let target = total * j as f64 / (m - 1) as f64;
        while i + 1 < seg.len() && start + seg[i] < target {
            start += seg[i];
            i += 1;
        }
        let s = if seg[i] > 0.0 { ((target - start) / seg[i]).clamp(0.0, 1.0) } else { 0.0 };
        out.push(land.retract(lerp(&nodes[i], &nodes[i + 1], s)));
    }
    out.push(nodes[nodes.len() - 1].clone());
    out
}

/// Fine sub-path through `a`, `mid`, `b` with `m` nodes (`m` odd), `mid` kept exactly.
fn refine<L: Landscape>(land: &L, a: &[f64], mid: &[f64], b: &[f64], m: usize) -> Vec<Vec<f64>> {
    let half = (m - 1) / 2;
    let mut out = Vec::with_capacity(m);
    for j in 0..half {
        let s = j as f64 / half as f64;
        out.push(if j == 0 { a.to_vec() } else { land.retract(lerp(a, mid, s)) });
    }
    out.push(mid.to_vec());
    for j in 1..=half {
        let s = j as f64 / half as f64;
        out.push(if j == half { b.to_vec() } else { land.retract(lerp(mid, b, s)) });
    }
    out
}

enum StageEnd {
    Converged,
    Stalled,
    Budget,
}

struct Stage {
    nodes: Vec<Vec<f64>>,
    energies: Vec<f64>,
    history: Vec<f64>,
    sweeps: usize,
    end: StageEnd,
}

/// `floor` is the larger endpoint energy of the original path: a node that
/// drops to it has slid off the ridge, so such moves are refused.
fn descend<L: Landscape>(land: &L, mut nodes: Vec<Vec<f64>>, opts: &DeformOptions, budget: usize, floor: f64) -> Stage {
    let m = nodes.len();
    let mut energies: Vec<f64> = nodes.iter().map(|x| land.energy(x)).collect();
    let mut history = Vec::new();
    let mut sweeps = 0;
    let end = loop {
        let k = argmax_interior(&energies);
        history.push(energies[k]);
        if land.stationarity(&nodes[k]) < opts.gtol {
            break StageEnd::Converged;
        }
        if sweeps >= budget {
            break StageEnd::Budget;
        }
        let w = opts.stall_window;
        if history.len() > w {
            let then = history[history.len() - 1 - w];
            let now = history[history.len() - 1];
            if then - now <= 1e-13 * (1.0 + now.abs()) {
                break StageEnd::Stalled;
            }
        }
        sweeps += 1;

        let x = &nodes[k];
        let g = land.gradient(x);
        let d = land.precondition(x, g.clone());
        let tau = land.tangent(x, diff(&nodes[k + 1], &nodes[k - 1]));
        let tn = metric_norm(land, &tau);
        let d_perp: Vec<f64> = if tn > 0.0 {
            let c = land.metric(&d, &tau) / (tn * tn);
            d.iter().zip(&tau).map(|(a, t)| a - c * t).collect()
        } else {
            d
        };
        let slope = dot(&g, &d_perp);
        let dn = metric_norm(land, &d_perp);
        if !(slope > 0.0) || dn == 0.0 {
            break StageEnd::Stalled;
        }
        // never move farther than half the distance to a neighbor
        let h = metric_norm(land, &diff(x, &nodes[k - 1])).min(metric_norm(land, &diff(x, &nodes[k + 1])));
        let mut s = opts.step0.min(0.5 * h / dn);
        let mut accepted = None;
        for _ in 0..60 {
            let y = land.retract(x.iter().zip(&d_perp).map(|(a, b)| a - s * b).collect());
            let ey = land.energy(&y);
            if ey <= energies[k] - opts.armijo * s * slope && ey > floor {
                accepted = Some((y, ey));
                break;
            }
            s *= 0.5;
        }
        let Some((y, ey)) = accepted else {
            break StageEnd::Stalled;
        };
        let old_max = energies[k];
        nodes[k] = y;
        energies[k] = ey;
        let candidate = resample(land, &nodes, m);
        let cand_e: Vec<f64> = candidate.iter().map(|x| land.energy(x)).collect();
        let cand_max = cand_e[1..m - 1].iter().cloned().fold(f64::MIN, f64::max);
        if cand_max <= old_max && cand_max > floor {
            nodes = candidate;
            energies = cand_e;
        }
    };
    Stage { nodes, energies, history, sweeps, end }
}

/// Runs the deformation on `path` (endpoints fixed, at least 5 nodes, odd count).
pub fn deform<L: Landscape>(land: &L, path: Vec<Vec<f64>>, opts: &DeformOptions) -> Deformation {
    let m = path.len();
    assert!(m >= 5 && m % 2 == 1, "paths need an odd number (>= 5) of nodes");
    let floor = land.energy(&path[0]).max(land.energy(&path[m - 1]));
    let mut active = path;
    let mut top: Option<Vec<Vec<f64>>> = None;
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut refinements = 0;
    loop {
        let stage = descend(land, active, opts, opts.max_iter.saturating_sub(iterations), floor);
        iterations += stage.sweeps;
        history.push(stage.history);
        if top.is_none() {
            top = Some(stage.nodes.clone());
        }
        let k = argmax_interior(&stage.energies);
        let done = match stage.end {
            StageEnd::Converged => true,
            StageEnd::Budget => true,
            StageEnd::Stalled => refinements >= opts.max_refinements || iterations >= opts.max_iter,
        };
        if done {
            let best = stage.nodes[k].clone();
            let grad_norm = land.stationarity(&best);
            return Deformation {
                path: top.unwrap(),
                energy: stage.energies[k],
                converged: grad_norm < opts.gtol,
                best,
                grad_norm,
                iterations,
                refinements,
                history,
            };
        }
        refinements += 1;
        active = refine(land, &stage.nodes[k - 1], &stage.nodes[k], &stage.nodes[k + 1], m);
    }
}
