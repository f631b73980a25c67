//! Weights for periodic functions sampled at `t_i = 2πi/N`, `N = 2n`.

use std::f64::consts::PI;

/// Kussmaul-Martensen weights `R_d`, `d = 0..N`, with
/// `∫₀^{2π} ln(4 sin²((t_i - τ)/2)) f(τ) dτ ≈ Σ_j R_{(i-j) mod N} f(t_j)`,
/// exact for trigonometric polynomials of degree below `n`.
pub fn log_weights(n_nodes: usize) -> Vec<f64> {
    assert!(
        n_nodes >= 2 && n_nodes.is_multiple_of(2),
        "node count must be even"
    );
    let n = n_nodes / 2;
    let nf = n as f64;
    (0..n_nodes)
        .map(|d| {
            let mut s = 0.0;
            for m in 1..n {
                s += (PI * (m * d) as f64 / nf).cos() / m as f64;
            }
            let alt = if d % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * s - PI / (nf * nf) * alt
        })
        .collect()
}

/// Spectral differentiation entry `D_{ij}`: derivative at `t_i` of the
/// trigonometric interpolant of the unit vector at `t_j`.
#[inline]
pub fn diff_entry(n_nodes: usize, i: usize, j: usize) -> f64 {
    if i == j {
        return 0.0;
    }
    let d = i as i64 - j as i64;
    let half = PI * d as f64 / n_nodes as f64;
    let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    0.5 * sign / half.tan()
}
