//! Reference solutions independent of the boundary-integral solver: the
//! separation-of-variables series for concentric circles and a grid-based
//! Lippmann-Schwinger solver for a homogeneous background.

mod ls;
mod series;

pub use ls::{ls_reference, ls_reference_extrapolated, square_cell_integral, LsGrid};
pub use series::{
    series_far_field, series_solution, ConcentricConfig, ModeCoefficients, SeriesSolution,
    MODE_CONDITION_LIMIT,
};

use crate::geometry::Vec2;
use crate::{far_field_constant, C64};

/// Far field `x̂ ↦ γ₀ e^{-ik₀ x̂·z}` of the free-space point source at `z`.
pub fn free_point_source_far_field(z: Vec2, k0: f64) -> impl Fn(Vec2) -> C64 {
    let gamma = far_field_constant(k0);
    move |xh: Vec2| gamma * C64::from_polar(1.0, -k0 * xh.dot(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::kernels::phi;

    #[test]
    fn free_source_far_field() {
        let k = 1.7;
        let f = free_point_source_far_field(Vec2::ZERO, k);
        assert_eq!(f(Vec2::new(0.6, 0.8)), far_field_constant(k));
        let f = free_point_source_far_field(Vec2::new(1.0, 0.0), k);
        assert!((f(Vec2::new(0.0, 1.0)) - far_field_constant(k)).norm() < 1e-16);
        // √R e^{-ikR} Φ(R x̂, z) tends to the far field
        let z = Vec2::new(0.3, -0.4);
        let xh = Vec2::from_angle(0.7);
        let r: f64 = 1e4;
        let f = free_point_source_far_field(z, k);
        let limit = r.sqrt() * C64::from_polar(1.0, -k * r) * phi(k, xh * r - z);
        assert!((limit - f(xh)).norm() < 1e-4 * f(xh).norm());
    }
}
