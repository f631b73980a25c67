//! Interface curves, layer classification and the interior quadrature mesh.

mod curve;
mod index;
mod mesh;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub use curve::{CurveNode, CurveShape, ParametricCurve};
pub use index::IndexField;
pub use mesh::{build_volume_mesh, gauss_legendre, MeshKind, VolumeMesh, MIN_MESH_NODES};

use crate::error::{Error, Result};

/// Points closer than this to an interface cannot be assigned to a layer.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn unit(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    /// Unit vector at angle `theta` from the x axis.
    #[inline]
    pub fn from_angle(theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c, s)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// The three media: unbounded exterior, the bounded layer, the obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerId {
    Exterior,
    Layer,
    Obstacle,
}

impl LayerId {
    pub fn index(self) -> usize {
        match self {
            LayerId::Exterior => 0,
            LayerId::Layer => 1,
            LayerId::Obstacle => 2,
        }
    }
}

/// Assign `p` to the medium containing it.
///
/// `s0` is the outer interface, `s1` the obstacle boundary.
pub fn classify_point(p: Vec2, s0: &ParametricCurve, s1: &ParametricCurve) -> Result<LayerId> {
    for curve in [s0, s1] {
        if curve.distance_to(p) < AMBIGUITY_TOLERANCE {
            return Err(Error::AmbiguousPoint {
                x: p.x,
                y: p.y,
                tolerance: AMBIGUITY_TOLERANCE,
            });
        }
    }
    if !s0.contains(p) {
        Ok(LayerId::Exterior)
    } else if !s1.contains(p) {
        Ok(LayerId::Layer)
    } else {
        Ok(LayerId::Obstacle)
    }
}

/// Smallest distance between the node sets of two curves.
pub fn min_node_distance(a: &ParametricCurve, b: &ParametricCurve) -> f64 {
    let mut best = f64::INFINITY;
    for na in a.nodes() {
        for nb in b.nodes() {
            best = best.min((na.position - nb.position).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circles() -> (ParametricCurve, ParametricCurve) {
        (
            ParametricCurve::circle(Vec2::ZERO, 1.5, 64).unwrap(),
            ParametricCurve::circle(Vec2::ZERO, 0.7, 64).unwrap(),
        )
    }

    #[test]
    fn classifies_the_three_layers() {
        let (s0, s1) = circles();
        assert_eq!(
            classify_point(Vec2::new(10.0, 0.0), &s0, &s1).unwrap(),
            LayerId::Exterior
        );
        assert_eq!(
            classify_point(Vec2::new(1.0, 0.0), &s0, &s1).unwrap(),
            LayerId::Layer
        );
        assert_eq!(
            classify_point(Vec2::ZERO, &s0, &s1).unwrap(),
            LayerId::Obstacle
        );
    }

    #[test]
    fn rejects_points_on_interfaces() {
        let (s0, s1) = circles();
        let on_s1 = Vec2::from_angle(0.3) * 0.7;
        assert!(matches!(
            classify_point(on_s1, &s0, &s1),
            Err(Error::AmbiguousPoint { .. })
        ));
        // between two nodes: the polygon would misplace it, the curve does not
        let between = Vec2::from_angle(std::f64::consts::PI / 64.0) * 1.5;
        assert!(classify_point(between, &s0, &s1).is_err());
    }

    #[test]
    fn points_between_polygon_and_curve() {
        let (s0, s1) = circles();
        // inside the circle but outside the 64-gon inscribed in it
        let theta = std::f64::consts::PI / 64.0;
        let p = Vec2::from_angle(theta) * (1.5 - 1e-6);
        assert_eq!(classify_point(p, &s0, &s1).unwrap(), LayerId::Layer);
        let q = Vec2::from_angle(theta) * (0.7 - 1e-7);
        assert_eq!(classify_point(q, &s0, &s1).unwrap(), LayerId::Obstacle);
    }

    #[test]
    fn translation_invariance() {
        let shift = Vec2::new(3.25, -1.5);
        let s0 = ParametricCurve::circle(shift, 1.5, 64).unwrap();
        let s1 = ParametricCurve::new(
            CurveShape::Ellipse {
                semi_axes: [0.8, 0.5],
            },
            shift,
            64,
        )
        .unwrap();
        let s0o = ParametricCurve::circle(Vec2::ZERO, 1.5, 64).unwrap();
        let s1o = ParametricCurve::new(
            CurveShape::Ellipse {
                semi_axes: [0.8, 0.5],
            },
            Vec2::ZERO,
            64,
        )
        .unwrap();
        for i in 0..40 {
            let p = Vec2::new(-2.0 + 0.1 * i as f64, 0.37 * (i as f64 * 0.7).sin());
            assert_eq!(
                classify_point(p, &s0o, &s1o).unwrap(),
                classify_point(p + shift, &s0, &s1).unwrap()
            );
        }
    }
}
