//! Brute-force critical levels of `Ĩ_p` on the unit circle for 2×2 problems.

use crate::error::{FucikError, Result};

fn energy(a: &[[f64; 2]; 2], p: f64, th: f64) -> f64 {
    let (x, y) = (th.cos(), th.sin());
    a[0][0] * x * x + 2.0 * a[0][1] * x * y + a[1][1] * y * y - p * (x.max(0.0).powi(2) + y.max(0.0).powi(2))
}

/// `dĨ/dθ = 2 τ·(Au − p u⁺)`.
fn slope(a: &[[f64; 2]; 2], p: f64, th: f64) -> f64 {
    let (x, y) = (th.cos(), th.sin());
    let gx = a[0][0] * x + a[0][1] * y - p * x.max(0.0);
    let gy = a[1][0] * x + a[1][1] * y - p * y.max(0.0);
    2.0 * (-y * gx + x * gy)
}

/// All constrained critical levels, sorted and de-duplicated.
///
/// The circle is scanned at `resolution` angles; every sign change of the
/// tangential derivative is refined by bisection.
pub fn dense_scan_oracle(a: [[f64; 2]; 2], p: f64, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 10_000 {
        return Err(FucikError::InvalidArgument("resolution must be at least 10^4".into()));
    }
    if (a[0][1] - a[1][0]).abs() > 1e-12 {
        return Err(FucikError::InvalidArgument("matrix must be symmetric".into()));
    }
    let two_pi = std::f64::consts::TAU;
    let step = two_pi / resolution as f64;
    let mut levels = Vec::new();
    for i in 0..resolution {
        let (mut lo, mut hi) = (i as f64 * step, (i + 1) as f64 * step);
        let (mut slo, shi) = (slope(&a, p, lo), slope(&a, p, hi));
        if slo == 0.0 {
            levels.push(energy(&a, p, lo));
            continue;
        }
        if slo * shi >= 0.0 {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let sm = slope(&a, p, mid);
            if sm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if sm * slo < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                slo = sm;
            }
        }
        levels.push(energy(&a, p, 0.5 * (lo + hi)));
    }
    levels.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for v in levels {
        if out.last().is_none_or(|last| (v - last).abs() > 1e-9) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Smallest critical level strictly above `lambda1`.
pub fn minimal_level_above(levels: &[f64], lambda1: f64) -> Option<f64> {
    levels.iter().cloned().find(|&v| v > lambda1 + 1e-9)
}
