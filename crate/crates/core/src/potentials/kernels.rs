//! Helmholtz kernels `Φ_k(x, y) = (i/4) H₀⁽¹⁾(k|x - y|)` and their derivatives.
//!
//! All functions take the difference vector `d = x - y`.

use crate::geometry::Vec2;
use crate::specialfn::hankel01;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `(H₀⁽¹⁾(x), H₁⁽¹⁾(x))`, NaN for `x ≤ 0`.
#[inline]
pub(crate) fn h01(x: f64) -> (C64, C64) {
    hankel01(x).unwrap_or((C64::new(f64::NAN, f64::NAN), C64::new(f64::NAN, f64::NAN)))
}

#[inline]
pub fn phi(k: f64, d: Vec2) -> C64 {
    0.25 * I * h01(k * d.norm()).0
}

/// `∇ₓ Φ`.
#[inline]
pub fn grad_phi(k: f64, d: Vec2) -> [C64; 2] {
    let r = d.norm();
    let c = -0.25 * I * k * h01(k * r).1 / r;
    [c * d.x, c * d.y]
}

/// `∂Φ/∂ν(y)` for unit normal `nu_y` at the source point.
#[inline]
pub fn double_layer(k: f64, d: Vec2, nu_y: Vec2) -> C64 {
    let r = d.norm();
    0.25 * I * k * h01(k * r).1 * (nu_y.dot(d) / r)
}

/// `∂Φ/∂ν(x)` for unit normal `nu_x` at the target point.
#[inline]
pub fn adjoint_double_layer(k: f64, d: Vec2, nu_x: Vec2) -> C64 {
    -0.25 * I * k * h01(k * d.norm()).1 * (nu_x.dot(d) / d.norm())
}

/// `∇ₓ ∂Φ/∂ν(y)`.
#[inline]
pub fn grad_double_layer(k: f64, d: Vec2, nu_y: Vec2) -> [C64; 2] {
    let r = d.norm();
    let (h0, h1) = h01(k * r);
    let radial = 0.25 * I * k * (k * h0 - 2.0 * h1 / r) / (r * r) * nu_y.dot(d);
    let along = 0.25 * I * k * h1 / r;
    [radial * d.x + along * nu_y.x, radial * d.y + along * nu_y.y]
}

/// `∂²Φ/∂ν(x)∂ν(y)`.
#[inline]
pub fn hypersingular(k: f64, d: Vec2, nu_x: Vec2, nu_y: Vec2) -> C64 {
    let g = grad_double_layer(k, d, nu_y);
    g[0] * nu_x.x + g[1] * nu_x.y
}
