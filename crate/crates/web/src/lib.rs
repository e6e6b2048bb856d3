//! Browser bindings: a traced curve as SVG, the critical profile at one `p`,
//! and the spectrum check. Results cross the boundary as SVG or JSON text.

use fucik_core::io::{render_svg, CurveRow};
use fucik_core::minimax::{mountain_pass_cp, newton_refine, trace_curve, MinimaxOptions};
use fucik_core::operator::count_through_level;
use fucik_core::{verify_spectrum, Backend, DiscreteOperator, Discretization};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest grid the page will trace; each point costs a mountain pass.
pub const MAX_POINTS: usize = 81;

fn operator(dimension: usize) -> Result<DiscreteOperator, String> {
    let cutoff = if dimension == 1 { 32 } else { 8 };
    let disc = Discretization::new(dimension, Backend::Spectral, cutoff, 12.0).map_err(|e| e.to_string())?;
    DiscreteOperator::assemble(&disc).map_err(|e| e.to_string())
}

pub fn curve_svg_text(from: f64, to: f64, step: f64) -> Result<String, String> {
    if !(step > 0.0) || !(to >= from) || !from.is_finite() || !to.is_finite() {
        return Err("need from ≤ to and a positive step".into());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    if n > MAX_POINTS {
        return Err(format!("{n} points requested, the page traces at most {MAX_POINTS}"));
    }
    let grid: Vec<f64> = (0..n).map(|i| from + i as f64 * step).collect();
    let op = operator(1)?;
    let trace = trace_curve(&grid, &op, &MinimaxOptions::default()).map_err(|e| e.to_string())?;
    Ok(render_svg(&CurveRow::from_trace(&trace), trace.lambda1, 1.0))
}

pub fn critical_profile_json(p: f64) -> Result<String, String> {
    if !p.is_finite() {
        return Err("p must be finite".into());
    }
    let op = operator(1)?;
    let cand = mountain_pass_cp(p, &op, &MinimaxOptions::default()).map_err(|e| e.to_string())?;
    let pt = newton_refine(&cand, &op).unwrap_or(cand);
    let disc = op.disc();
    let u = pt.u.original_values();
    // the sample grid reaches far into the tail; keep the visible part
    let (x, u): (Vec<f64>, Vec<f64>) =
        (0..disc.len()).map(|i| (disc.node(i)[0], u[i])).filter(|(x, _)| x.abs() <= 8.0).unzip();
    Ok(json!({
        "p": p,
        "c": pt.c,
        "alpha": pt.alpha(),
        "beta": pt.beta(),
        "residual": pt.residual,
        "refined": pt.refined,
        "x": x,
        "u": u,
    })
    .to_string())
}

pub fn spectrum_json(dimension: usize, kmax: usize) -> Result<String, String> {
    if !(1..=2).contains(&dimension) || kmax == 0 || kmax > 8 {
        return Err("dimension must be 1 or 2 and kmax in 1..=8".into());
    }
    let op = operator(dimension)?;
    let es = op.eigensystem(count_through_level(dimension, kmax)).map_err(|e| e.to_string())?;
    serde_json::to_string(&verify_spectrum(&es, dimension, 1e-12)).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn curve_svg(from: f64, to: f64, step: f64) -> Result<String, JsValue> {
    curve_svg_text(from, to, step).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn critical_profile(p: f64) -> Result<String, JsValue> {
    critical_profile_json(p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectrum(dimension: usize, kmax: usize) -> Result<String, JsValue> {
    spectrum_json(dimension, kmax).map_err(|e| JsValue::from_str(&e))
}
