//! CSV, JSON and SVG artifacts for traced curves and solution profiles.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{FucikError, Result};
use crate::minimax::CurveTrace;
use crate::weighted::FieldSample;

pub const CURVE_HEADER: [&str; 7] = ["p", "alpha", "beta", "grad_norm", "residual", "iterations", "refined"];
pub const SCHEMA_VERSION: u32 = 1;

/// One row of a curve file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub grad_norm: f64,
    pub residual: f64,
    pub iterations: usize,
    pub refined: bool,
}

impl CurveRow {
    pub fn from_trace(trace: &CurveTrace) -> Vec<CurveRow> {
        trace
            .points
            .iter()
            .map(|pt| CurveRow {
                p: pt.p,
                alpha: pt.alpha(),
                beta: pt.beta(),
                grad_norm: pt.grad_norm,
                residual: pt.residual,
                iterations: pt.iterations,
                refined: pt.refined,
            })
            .collect()
    }
}

/// 17 significant digits.
fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_curve_csv<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for r in rows {
        w.write_record([
            real(r.p),
            real(r.alpha),
            real(r.beta),
            real(r.grad_norm),
            real(r.residual),
            r.iterations.to_string(),
            r.refined.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<CurveRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CURVE_HEADER.iter().copied()) {
        return Err(FucikError::Malformed(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rd.deserialize().map(|r| r.map_err(FucikError::from)).collect()
}

/// `x,u` for a one-dimensional profile in the original variable.
pub fn write_profile_csv<W: Write>(u: &FieldSample, out: W) -> Result<()> {
    let disc = u.disc();
    if disc.dimension() != 1 {
        return Err(FucikError::Unsupported("profiles are written for one-dimensional grids".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "u"])?;
    for (i, v) in u.original_values().into_iter().enumerate() {
        w.write_record([real(disc.node(i)[0]), real(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize().map(|r| r.map_err(FucikError::from)).collect()
}

/// Run summary stored next to the data files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest<T> {
    pub schema_version: u32,
    pub command: String,
    pub files: Vec<String>,
    pub report: T,
}

impl<T: Serialize> Manifest<T> {
    pub fn new(command: &str, files: Vec<String>, report: T) -> Self {
        Self { schema_version: SCHEMA_VERSION, command: command.to_string(), files, report }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| FucikError::Malformed(e.to_string()))
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Curve in the `(α, β)` plane with the lines `α = λ₁`, `β = λ₁` dashed and
/// a marker at `(λ₂, λ₂)`. An empty trace gives axes only.
pub fn render_svg(rows: &[CurveRow], lambda1: f64, lambda2: f64) -> String {
    let mut hi = 2.0 * lambda2;
    for r in rows {
        hi = hi.max(r.alpha).max(r.beta);
    }
    let hi = (hi * 1.05 * 2.0).ceil() / 2.0;
    let sx = |a: f64| MARGIN + a / hi * (WIDTH - 2.0 * MARGIN);
    let sy = |b: f64| HEIGHT - MARGIN - b / hi * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0, x1, y1) = (sx(0.0), sy(0.0), sx(hi), sy(hi));
    let _ = writeln!(s, r#"<g id="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y0:.3}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{y1:.3}"/>"#);
    let ticks = (hi * 2.0).round() as usize;
    for k in 0..=ticks {
        let v = k as f64 * 0.5;
        let _ = writeln!(s, r#"<line x1="{:.3}" y1="{y0:.3}" x2="{:.3}" y2="{:.3}"/>"#, sx(v), sx(v), y0 + 4.0);
        let _ = writeln!(s, r#"<line x1="{x0:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#, sy(v), x0 - 4.0, sy(v));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12" text-anchor="middle">"#);
    for k in (0..=ticks).step_by(2) {
        let v = k as f64 * 0.5;
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}">{v:.0}</text>"#, sx(v), y0 + 18.0);
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}">{v:.0}</text>"#, x0 - 16.0, sy(v) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}">α</text>"#, 0.5 * (x0 + x1), HEIGHT - 16.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.3}">β</text>"#, 0.5 * (y0 + y1));
    let _ = writeln!(s, "</g>");
    if !rows.is_empty() {
        let _ = writeln!(s, r#"<g id="trivial-lines" stroke="gray" stroke-dasharray="6,4">"#);
        let _ = writeln!(s, r#"<line x1="{:.3}" y1="{y0:.3}" x2="{:.3}" y2="{y1:.3}"/>"#, sx(lambda1), sx(lambda1));
        let _ = writeln!(s, r#"<line x1="{x0:.3}" y1="{:.3}" x2="{x1:.3}" y2="{:.3}"/>"#, sy(lambda1), sy(lambda1));
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<circle id="diagonal-marker" cx="{:.3}" cy="{:.3}" r="4" fill="red" data-alpha="{lambda2}" data-beta="{lambda2}"/>"#,
            sx(lambda2),
            sy(lambda2)
        );
        let pts: Vec<String> = rows.iter().map(|r| format!("{:.3},{:.3}", sx(r.alpha), sy(r.beta))).collect();
        let _ = writeln!(
            s,
            r#"<polyline id="curve" fill="none" stroke="blue" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
