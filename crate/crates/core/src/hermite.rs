//! Hermite functions scaled for the transformed self-similar operator.
//!
//! In one dimension the transformed operator is `-v'' + (x²/16 + 1/4) v`.
//! Its eigenfunctions are `h_k(x/2)/√2`, where `h_k` are the standard
//! Hermite functions, orthonormal in `L²(dx)`.

/// Values of the first `count` scaled Hermite functions at `x`.
///
/// Three-term recurrence in `y = x/2`; stable for the degrees used here
/// because every term carries the Gaussian factor from the start.
pub fn hermite_functions(count: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if count == 0 {
        return out;
    }
    let y = 0.5 * x;
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
    out[0] = p0;
    if count > 1 {
        out[1] = std::f64::consts::SQRT_2 * y * p0;
    }
    for k in 2..count {
        let kf = k as f64;
        out[k] = (2.0 / kf).sqrt() * y * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
    }
    let norm = std::f64::consts::FRAC_1_SQRT_2;
    for v in &mut out {
        *v *= norm;
    }
    out
}

/// Eigenvalue of the one-dimensional transformed operator for degree `k`.
pub fn level_1d(k: usize) -> f64 {
    (k as f64 + 1.0) / 2.0
}

/// Largest |x| where the degree-`k` function still oscillates.
pub fn turning_point(k: usize) -> f64 {
    2.0 * ((2 * k + 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_is_gaussian() {
        for &x in &[-3.0, 0.0, 0.7, 5.0] {
            let h = hermite_functions(1, x)[0];
            let exact = (-x * x / 8.0).exp() / (2.0f64.sqrt() * std::f64::consts::PI.powf(0.25));
            assert!((h - exact).abs() < 1e-14 * exact);
        }
    }

    #[test]
    fn orthonormal_under_fine_quadrature() {
        let n = 12;
        let h = 0.01;
        let mut gram = vec![vec![0.0; n]; n];
        let mut x = -40.0;
        while x <= 40.0 {
            let v = hermite_functions(n, x);
            for i in 0..n {
                for j in 0..n {
                    gram[i][j] += h * v[i] * v[j];
                }
            }
            x += h;
        }
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - target).abs() < 1e-10, "{i} {j} {}", gram[i][j]);
            }
        }
    }

    #[test]
    fn satisfies_the_oscillator_equation() {
        // -v'' + (x²/16 + 1/4) v = (k+1)/2 v, checked by central differences
        let d = 1e-3;
        for k in 0..6 {
            for &x in &[-2.3, 0.4, 1.9] {
                let v = |t: f64| hermite_functions(k + 1, t)[k];
                let second = (v(x + d) - 2.0 * v(x) + v(x - d)) / (d * d);
                let lhs = -second + (x * x / 16.0 + 0.25) * v(x);
                assert!((lhs - level_1d(k) * v(x)).abs() < 1e-6);
            }
        }
    }
}
