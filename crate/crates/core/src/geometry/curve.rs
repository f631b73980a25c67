use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};

/// Shape of a closed, counter-clockwise parametrized C² curve, `t ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveShape {
    Circle {
        radius: f64,
    },
    Ellipse {
        semi_axes: [f64; 2],
    },
    /// `scale * (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`.
    Kite {
        #[serde(default = "one")]
        scale: f64,
    },
    /// Star-shaped curve `r(t) (cos t, sin t)` with
    /// `r(t) = a_0 + sum_k a_k cos(kt) + b_k sin(kt)`.
    ///
    /// `cos[0]` is `a_0`; `sin[k-1]` is `b_k`.
    Fourier {
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

/// Precomputed data at one quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveNode {
    pub t: f64,
    pub position: Vec2,
    pub derivative: Vec2,
    pub second_derivative: Vec2,
    /// Outward unit normal.
    pub normal: Vec2,
    /// `|x'(t)|`.
    pub jacobian: f64,
}

impl CurveNode {
    /// Signed curvature, positive for a convex counter-clockwise curve.
    pub fn curvature(&self) -> f64 {
        self.derivative.cross(self.second_derivative) / self.jacobian.powi(3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    shape: CurveShape,
    center: Vec2,
    nodes: Vec<CurveNode>,
    max_second_derivative: f64,
}

impl ParametricCurve {
    pub fn new(shape: CurveShape, center: Vec2, n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "curve node count must be even and at least 4, got {n}"
            )));
        }
        validate_shape(&shape)?;
        let mut curve = ParametricCurve {
            shape,
            center,
            nodes: Vec::with_capacity(n),
            max_second_derivative: 0.0,
        };
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let node = curve.node_at(t);
            if !(node.jacobian > 0.0) || !node.jacobian.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "curve speed vanishes at t = {t}"
                )));
            }
            curve.nodes.push(node);
        }
        // A clockwise parametrization would flip the normals inward.
        let doubled_area: f64 = curve
            .nodes
            .iter()
            .map(|nd| nd.position.cross(nd.derivative))
            .sum::<f64>();
        if doubled_area <= 0.0 {
            return Err(Error::InvalidInput(
                "curve must be counter-clockwise oriented".into(),
            ));
        }
        let fine = 8 * n;
        curve.max_second_derivative = (0..fine)
            .map(|i| curve.eval(2.0 * PI * i as f64 / fine as f64).2.norm())
            .fold(0.0, f64::max);
        Ok(curve)
    }

    pub fn circle(center: Vec2, radius: f64, n: usize) -> Result<Self> {
        Self::new(CurveShape::Circle { radius }, center, n)
    }

    pub fn shape(&self) -> &CurveShape {
        &self.shape
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    /// Number of quadrature nodes `N`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[CurveNode] {
        &self.nodes
    }

    /// The same curve with a different node count.
    pub fn with_nodes(&self, n: usize) -> Result<Self> {
        Self::new(self.shape.clone(), self.center, n)
    }

    /// Node tuples `(position, normal, jacobian)` in parameter order.
    pub fn curve_nodes(&self) -> Vec<(Vec2, Vec2, f64)> {
        self.nodes
            .iter()
            .map(|n| (n.position, n.normal, n.jacobian))
            .collect()
    }

    /// Trapezoid weight `2π/N` in the parameter variable.
    pub fn parameter_weight(&self) -> f64 {
        2.0 * PI / self.nodes.len() as f64
    }

    /// Largest distance between consecutive nodes.
    pub fn node_spacing(&self) -> f64 {
        let n = self.nodes.len();
        (0..n)
            .map(|i| (self.nodes[(i + 1) % n].position - self.nodes[i].position).norm())
            .fold(0.0, f64::max)
    }

    /// Arc length by the trapezoid rule on the nodes.
    pub fn perimeter(&self) -> f64 {
        self.parameter_weight() * self.nodes.iter().map(|n| n.jacobian).sum::<f64>()
    }

    /// `(x(t), x'(t), x''(t))`.
    pub fn eval(&self, t: f64) -> (Vec2, Vec2, Vec2) {
        let (s, c) = t.sin_cos();
        let (p, d, dd) = match &self.shape {
            CurveShape::Circle { radius } => (
                Vec2::new(c, s) * *radius,
                Vec2::new(-s, c) * *radius,
                Vec2::new(-c, -s) * *radius,
            ),
            CurveShape::Ellipse { semi_axes: [a, b] } => (
                Vec2::new(a * c, b * s),
                Vec2::new(-a * s, b * c),
                Vec2::new(-a * c, -b * s),
            ),
            CurveShape::Kite { scale } => {
                let (s2, c2) = (2.0 * t).sin_cos();
                (
                    Vec2::new(c + 0.65 * c2 - 0.65, 1.5 * s) * *scale,
                    Vec2::new(-s - 1.3 * s2, 1.5 * c) * *scale,
                    Vec2::new(-c - 2.6 * c2, -1.5 * s) * *scale,
                )
            }
            CurveShape::Fourier { cos, sin } => {
                let (r, dr, ddr) = fourier_radius(cos, sin, t);
                let e = Vec2::new(c, s);
                let e_perp = Vec2::new(-s, c);
                (
                    e * r,
                    e * dr + e_perp * r,
                    e * (ddr - r) + e_perp * (2.0 * dr),
                )
            }
        };
        (p + self.center, d, dd)
    }

    fn node_at(&self, t: f64) -> CurveNode {
        let (position, derivative, second_derivative) = self.eval(t);
        let jacobian = derivative.norm();
        let normal = Vec2::new(derivative.y, -derivative.x) * (1.0 / jacobian);
        CurveNode {
            t,
            position,
            derivative,
            second_derivative,
            normal,
            jacobian,
        }
    }

    /// Distance from `p` to the curve trace.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.closest_parameter(p).1
    }

    /// Parameter of the closest trace point and the distance to it.
    pub fn closest_parameter(&self, p: Vec2) -> (f64, f64) {
        let samples = 8 * self.nodes.len();
        let dt = 2.0 * PI / samples as f64;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..samples {
            let t = i as f64 * dt;
            let d = (self.eval(t).0 - p).norm();
            if d < best.1 {
                best = (t, d);
            }
        }
        let mut t = best.0;
        for _ in 0..30 {
            let (x, dx, ddx) = self.eval(t);
            let r = x - p;
            let g = r.dot(dx);
            let gp = dx.dot(dx) + r.dot(ddx);
            if gp <= 0.0 {
                break;
            }
            let step = (g / gp).clamp(-dt, dt);
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let d = (self.eval(t).0 - p).norm();
        if d < best.1 {
            (t.rem_euclid(2.0 * PI), d)
        } else {
            best
        }
    }

    /// Whether `p` lies in the bounded region enclosed by the curve.
    ///
    /// Winding number of the inscribed polygon, refined while `p` sits in the
    /// band where polygon and curve may disagree. Points that stay in that band
    /// at the finest level fall back to the side of the local normal.
    pub fn contains(&self, p: Vec2) -> bool {
        let mut m = self.nodes.len();
        let finest = 64 * self.nodes.len();
        loop {
            let dt = 2.0 * PI / m as f64;
            let mut total = 0.0;
            let mut min_dist = f64::INFINITY;
            let mut prev = self.eval(0.0).0;
            for i in 1..=m {
                let cur = self.eval(i as f64 * dt).0;
                let a = prev - p;
                let b = cur - p;
                total += a.cross(b).atan2(a.dot(b));
                min_dist = min_dist.min(segment_distance(p, prev, cur));
                prev = cur;
            }
            let winding = total / (2.0 * PI);
            let sagitta = self.max_second_derivative * dt * dt / 8.0;
            let settled = (winding - winding.round()).abs() <= 0.1 && min_dist > 2.0 * sagitta;
            if settled {
                return winding.round() != 0.0;
            }
            if m >= finest {
                let (t, _) = self.closest_parameter(p);
                let node = self.node_at(t);
                return (p - node.position).dot(node.normal) < 0.0;
            }
            m *= 2;
        }
    }
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * s)).norm()
}

fn fourier_radius(cos: &[f64], sin: &[f64], t: f64) -> (f64, f64, f64) {
    let mut r = cos.first().copied().unwrap_or(0.0);
    let mut dr = 0.0;
    let mut ddr = 0.0;
    for (k, a) in cos.iter().enumerate().skip(1) {
        let kf = k as f64;
        let (s, c) = (kf * t).sin_cos();
        r += a * c;
        dr -= a * kf * s;
        ddr -= a * kf * kf * c;
    }
    for (j, b) in sin.iter().enumerate() {
        let kf = (j + 1) as f64;
        let (s, c) = (kf * t).sin_cos();
        r += b * s;
        dr += b * kf * c;
        ddr -= b * kf * kf * s;
    }
    (r, dr, ddr)
}

fn validate_shape(shape: &CurveShape) -> Result<()> {
    let positive = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "{what} must be positive, got {v}"
            )))
        }
    };
    match shape {
        CurveShape::Circle { radius } => positive(*radius, "radius"),
        CurveShape::Ellipse { semi_axes: [a, b] } => {
            positive(*a, "semi-axis")?;
            positive(*b, "semi-axis")
        }
        CurveShape::Kite { scale } => positive(*scale, "kite scale"),
        CurveShape::Fourier { cos, sin } => {
            if cos.is_empty() {
                return Err(Error::InvalidInput("fourier curve needs a_0".into()));
            }
            let samples = 16 * (cos.len() + sin.len()).max(16);
            for i in 0..samples {
                let t = 2.0 * PI * i as f64 / samples as f64;
                if fourier_radius(cos, sin, t).0 <= 0.0 {
                    return Err(Error::InvalidInput(
                        "fourier radius must stay positive".into(),
                    ));
                }
            }
            Ok(())
        }
    }
}
