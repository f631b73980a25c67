use std::f64::consts::PI;

use num_complex::Complex64;

use super::{IndexField, ParametricCurve, Vec2, AMBIGUITY_TOLERANCE};
use crate::error::{Error, Result};

pub const MIN_MESH_NODES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    /// Uniform grid of spacing `h` clipped to the interior, weight `h²` per node.
    Cartesian,
    /// Gauss-Legendre in the radial variable times trapezoid in the curve
    /// parameter, on the star-shaped map `c + s (x(t) - c)`.
    MappedPolar,
}

/// Quadrature nodes and weights covering the obstacle.
#[derive(Debug, Clone)]
pub struct VolumeMesh {
    pub kind: MeshKind,
    pub nodes: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub h: f64,
    pub n_values: Vec<Complex64>,
}

/// Uniform grid clipped to the interior of `s1`.
///
/// Grid points are `center + h (i + ½, j + ½)`; a point is kept when it lies strictly
/// inside the curve and always receives the full cell weight `h²`.
pub fn build_volume_mesh(s1: &ParametricCurve, h: f64, index: &IndexField) -> Result<VolumeMesh> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mesh spacing must be positive, got {h}"
        )));
    }
    index.validate()?;
    let c = s1.center();
    let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
    for n in s1.nodes() {
        lo = Vec2::new(lo.x.min(n.position.x), lo.y.min(n.position.y));
        hi = Vec2::new(hi.x.max(n.position.x), hi.y.max(n.position.y));
    }
    // nodes can bulge past the polygon hull by at most the sagitta
    let pad = 0.5 * s1.node_spacing() + h;
    let i0 = ((lo.x - pad - c.x) / h).floor() as i64;
    let i1 = ((hi.x + pad - c.x) / h).ceil() as i64;
    let j0 = ((lo.y - pad - c.y) / h).floor() as i64;
    let j1 = ((hi.y + pad - c.y) / h).ceil() as i64;

    let mut nodes = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let p = Vec2::new(c.x + (i as f64 + 0.5) * h, c.y + (j as f64 + 0.5) * h);
            if s1.contains(p) && s1.distance_to(p) >= AMBIGUITY_TOLERANCE {
                nodes.push(p);
            }
        }
    }
    if nodes.len() < MIN_MESH_NODES {
        return Err(Error::MeshTooCoarse {
            nodes: nodes.len(),
            required: MIN_MESH_NODES,
        });
    }
    let weights = vec![h * h; nodes.len()];
    finish(MeshKind::Cartesian, nodes, weights, h, index)
}

impl VolumeMesh {
    /// Smooth-integrand quadrature over a region star-shaped with respect to
    /// the curve center, with radial and tangential spacing about `h`.
    ///
    /// Exact up to the quadrature error of smooth functions; used where the
    /// integrand does not vanish on the boundary and the staircase error of
    /// the Cartesian mesh would dominate.
    pub fn mapped_polar(s1: &ParametricCurve, h: f64, index: &IndexField) -> Result<VolumeMesh> {
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "mesh spacing must be positive, got {h}"
            )));
        }
        index.validate()?;
        let c = s1.center();
        let reach = s1
            .nodes()
            .iter()
            .map(|n| (n.position - c).norm())
            .fold(0.0, f64::max);
        let radial = ((reach / h).ceil() as usize).max(8);
        let mut angular = ((s1.perimeter() / h).ceil() as usize).max(16);
        angular += angular % 2;
        let (gs, gw) = gauss_legendre(radial);
        let dt = 2.0 * PI / angular as f64;
        let mut nodes = Vec::with_capacity(radial * angular);
        let mut weights = Vec::with_capacity(radial * angular);
        for a in 0..angular {
            let (x, dx, _) = s1.eval(a as f64 * dt);
            let arm = x - c;
            let jac = arm.cross(dx);
            if !(jac > 0.0) {
                return Err(Error::InvalidInput(
                    "curve is not star-shaped with respect to its center".into(),
                ));
            }
            for (s, w) in gs.iter().zip(&gw) {
                // Gauss nodes on [-1, 1] mapped to [0, 1]
                let s01 = 0.5 * (s + 1.0);
                nodes.push(c + arm * s01);
                weights.push(0.5 * w * s01 * jac * dt);
            }
        }
        finish(MeshKind::MappedPolar, nodes, weights, h, index)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Radius of the disk with the same area as node `q`'s cell.
    pub fn cell_radius(&self, q: usize) -> f64 {
        (self.weights[q] / PI).sqrt()
    }

    /// Copy with the nodes listed in `order` (a permutation of `0..len`).
    pub fn permuted(&self, order: &[usize]) -> VolumeMesh {
        VolumeMesh {
            kind: self.kind,
            nodes: order.iter().map(|&i| self.nodes[i]).collect(),
            weights: order.iter().map(|&i| self.weights[i]).collect(),
            h: self.h,
            n_values: order.iter().map(|&i| self.n_values[i]).collect(),
        }
    }

    /// Same nodes with `n` resampled from another index field.
    pub fn with_index(&self, index: &IndexField) -> Result<VolumeMesh> {
        index.validate()?;
        finish(
            self.kind,
            self.nodes.clone(),
            self.weights.clone(),
            self.h,
            index,
        )
    }
}

fn finish(
    kind: MeshKind,
    nodes: Vec<Vec2>,
    weights: Vec<f64>,
    h: f64,
    index: &IndexField,
) -> Result<VolumeMesh> {
    let n_values: Vec<Complex64> = nodes.iter().map(|&p| index.eval(p)).collect();
    if let Some(bad) = n_values.iter().find(|n| !(n.re > 0.0) || n.im < 0.0) {
        return Err(Error::InvalidInput(format!(
            "refractive index must have Re n > 0 and Im n >= 0, found {bad}"
        )));
    }
    Ok(VolumeMesh {
        kind,
        nodes,
        weights,
        h,
        n_values,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(r: f64) -> ParametricCurve {
        ParametricCurve::circle(Vec2::ZERO, r, 64).unwrap()
    }

    #[test]
    fn disk_area_within_ten_percent() {
        let mesh = build_volume_mesh(&disk(0.7), 0.14, &IndexField::constant(1.0)).unwrap();
        let area = PI * 0.49;
        assert!(((mesh.total_weight() - area) / area).abs() < 0.1);
        assert!(mesh.n_values.iter().all(|n| *n == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn area_error_bounded_by_boundary_strip() {
        let area = PI * 0.49;
        let perimeter = 2.0 * PI * 0.7;
        for h in [0.14, 0.1, 0.07, 0.05, 0.035, 0.02] {
            let m = build_volume_mesh(&disk(0.7), h, &IndexField::constant(1.0)).unwrap();
            let err = (m.total_weight() - area).abs();
            assert!(err < perimeter * h / 2.0_f64.sqrt(), "h={h} err={err}");
        }
    }

    #[test]
    fn all_nodes_strictly_inside() {
        let c = ParametricCurve::new(
            super::super::CurveShape::Kite { scale: 0.5 },
            Vec2::ZERO,
            64,
        )
        .unwrap();
        let mesh = build_volume_mesh(&c, 0.05, &IndexField::constant(1.0)).unwrap();
        assert!(mesh.nodes.iter().all(|&p| c.contains(p)));
        assert!(mesh.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn too_coarse_mesh_is_rejected() {
        assert!(matches!(
            build_volume_mesh(&disk(0.7), 0.5, &IndexField::constant(1.0)),
            Err(Error::MeshTooCoarse { .. })
        ));
    }

    #[test]
    fn absorbing_sign_is_enforced() {
        let bad = IndexField::Constant {
            value: Complex64::new(1.5, -0.1),
        };
        assert!(build_volume_mesh(&disk(0.7), 0.1, &bad).is_err());
    }

    #[test]
    fn polar_mesh_integrates_smooth_functions() {
        let mesh = VolumeMesh::mapped_polar(&disk(0.7), 0.05, &IndexField::constant(1.0)).unwrap();
        let area = PI * 0.49;
        assert!((mesh.total_weight() - area).abs() < 1e-13);
        // integral of x^2 over the disk = pi r^4 / 4
        let m2: f64 = mesh
            .nodes
            .iter()
            .zip(&mesh.weights)
            .map(|(p, w)| p.x * p.x * w)
            .sum();
        assert!((m2 - PI * 0.7_f64.powi(4) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(7);
        let sum: f64 = w.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        let m12: f64 = x.iter().zip(&w).map(|(x, w)| x.powi(12) * w).sum();
        assert!((m12 - 2.0 / 13.0).abs() < 1e-14);
    }
}
