use std::f64::consts::PI;

use faer::Mat;

use super::kernels::{self, h01};
use crate::geometry::{Vec2, VolumeMesh};
use crate::linalg::{build_matrix, matvec};
use crate::specialfn::bessel_j;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Where a volume operator is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum VolumeTargets<'a> {
    /// The mesh nodes themselves (square operator).
    Nodes,
    Points(&'a [Vec2]),
    /// Normal derivative `ν·∇ₓ` at the given points.
    NormalDerivative {
        points: &'a [Vec2],
        normals: &'a [Vec2],
    },
}

/// `V`, or its normal derivative `V′`, acting on nodal values of the field.
#[derive(Debug, Clone)]
pub struct VolumeOperator {
    pub k: f64,
    /// `m_q = k² (n(y_q) - 1)`.
    pub contrast: Vec<C64>,
    pub matrix: Mat<C64>,
}

impl VolumeOperator {
    pub fn apply(&self, field: &[C64]) -> Vec<C64> {
        matvec(self.matrix.as_ref(), field)
    }
}

pub fn contrast(mesh: &VolumeMesh, k: f64) -> Vec<C64> {
    mesh.n_values.iter().map(|n| k * k * (n - 1.0)).collect()
}

/// `∫_{|y - q| < a} Φ(x, y) dy` for `ρ = |x - q|`.
pub fn disk_integral(k: f64, a: f64, rho: f64) -> C64 {
    if rho < a {
        let (_, h1a) = h01(k * a);
        -1.0 / (k * k) + 0.5 * I * PI * a / k * bessel_j(0, k * rho) * h1a
    } else {
        2.0 * PI * a * bessel_j(1, k * a) / k * kernels::phi(k, Vec2::new(rho, 0.0))
    }
}

/// Radial factor `g` with `∇ₓ ∫_{|y - q| < a} Φ(x, y) dy = g (x - q)` for `ρ < a`.
fn disk_gradient_factor(k: f64, a: f64, rho: f64) -> C64 {
    let (_, h1a) = h01(k * a);
    let j1_over_rho = if rho == 0.0 {
        0.5 * k
    } else {
        bessel_j(1, k * rho) / rho
    };
    -0.5 * I * PI * a * h1a * j1_over_rho
}

/// Entry of `V` coupling target `x` to node `q`, contrast included.
///
/// Targets inside the equal-area disk of the node (in particular the node
/// itself, `self_node = true`) use the exact disk integral.
#[inline]
pub fn volume_entry(
    mesh: &VolumeMesh,
    contrast: &[C64],
    k: f64,
    x: Vec2,
    q: usize,
    self_node: bool,
) -> C64 {
    let m = contrast[q];
    if m == ZERO {
        return ZERO;
    }
    let a = mesh.cell_radius(q);
    let d = x - mesh.nodes[q];
    let rho = if self_node { 0.0 } else { d.norm() };
    if self_node || rho < a {
        m * disk_integral(k, a, rho)
    } else {
        m * kernels::phi(k, d) * mesh.weights[q]
    }
}

/// Entry of `ν·∇ₓ V` at target `x` with unit normal `nu`.
#[inline]
pub fn volume_normal_entry(
    mesh: &VolumeMesh,
    contrast: &[C64],
    k: f64,
    x: Vec2,
    nu: Vec2,
    q: usize,
) -> C64 {
    let m = contrast[q];
    if m == ZERO {
        return ZERO;
    }
    let a = mesh.cell_radius(q);
    let d = x - mesh.nodes[q];
    let rho = d.norm();
    if rho < a {
        m * disk_gradient_factor(k, a, rho) * nu.dot(d)
    } else {
        let g = kernels::grad_phi(k, d);
        m * (g[0] * nu.x + g[1] * nu.y) * mesh.weights[q]
    }
}

/// `∇ₓ V` entry.
#[inline]
pub fn volume_gradient_entry(
    mesh: &VolumeMesh,
    contrast: &[C64],
    k: f64,
    x: Vec2,
    q: usize,
) -> [C64; 2] {
    let m = contrast[q];
    if m == ZERO {
        return [ZERO, ZERO];
    }
    let a = mesh.cell_radius(q);
    let d = x - mesh.nodes[q];
    let rho = d.norm();
    if rho < a {
        let g = m * disk_gradient_factor(k, a, rho);
        [g * d.x, g * d.y]
    } else {
        let g = kernels::grad_phi(k, d);
        let s = m * mesh.weights[q];
        [g[0] * s, g[1] * s]
    }
}

pub fn assemble_volume_op(mesh: &VolumeMesh, k: f64, targets: VolumeTargets<'_>) -> VolumeOperator {
    let contrast = contrast(mesh, k);
    let c = &contrast;
    let matrix = match targets {
        VolumeTargets::Nodes => build_matrix(mesh.len(), mesh.len(), |i, q| {
            volume_entry(mesh, c, k, mesh.nodes[i], q, i == q)
        }),
        VolumeTargets::Points(points) => build_matrix(points.len(), mesh.len(), |i, q| {
            volume_entry(mesh, c, k, points[i], q, false)
        }),
        VolumeTargets::NormalDerivative { points, normals } => {
            assert_eq!(points.len(), normals.len());
            build_matrix(points.len(), mesh.len(), |i, q| {
                volume_normal_entry(mesh, c, k, points[i], normals[i], q)
            })
        }
    };
    VolumeOperator {
        k,
        contrast,
        matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gauss_legendre, IndexField, ParametricCurve};

    /// `∫₀^hi f` by Gauss-Legendre on panels graded geometrically toward 0.
    fn graded(f: impl Fn(f64) -> C64, hi: f64) -> C64 {
        let (gx, gw) = gauss_legendre(20);
        let mut total = ZERO;
        let mut b = hi;
        for _ in 0..60 {
            let a = 0.5 * b;
            for (s, w) in gx.iter().zip(&gw) {
                let r = a + 0.5 * (b - a) * (s + 1.0);
                total += 0.5 * (b - a) * w * f(r);
            }
            b = a;
        }
        total
    }

    /// Integral of Φ over the disk of radius `a` centered at the origin,
    /// evaluated at `(rho, 0)` in polar coordinates about the target when it
    /// lies inside, about the disk center otherwise.
    fn polar_reference(k: f64, a: f64, rho: f64) -> C64 {
        let nt = 256;
        let x = Vec2::new(rho, 0.0);
        let mut total = ZERO;
        for it in 0..nt {
            let t = 2.0 * PI * (it as f64 + 0.5) / nt as f64;
            let e = Vec2::from_angle(t);
            total += if rho < a {
                let xe = x.dot(e);
                let reach = -xe + (a * a - rho * rho + xe * xe).sqrt();
                graded(|r| r * kernels::phi(k, Vec2::new(r, 0.0)), reach)
            } else {
                let (gx, gw) = gauss_legendre(40);
                gx.iter()
                    .zip(&gw)
                    .map(|(s, w)| {
                        let r = 0.5 * a * (s + 1.0);
                        0.5 * a * w * r * kernels::phi(k, x - e * r)
                    })
                    .sum()
            };
        }
        total * (2.0 * PI / nt as f64)
    }

    #[test]
    fn disk_self_integral_matches_quadrature() {
        for h in [0.1, 0.05] {
            let a = h / PI.sqrt();
            for k in [1.0, 2.5] {
                let exact = disk_integral(k, a, 0.0);
                let reference = polar_reference(k, a, 0.0);
                assert!(
                    (exact - reference).norm() < 1e-8 * reference.norm().max(a * a),
                    "{exact} {reference}"
                );
            }
        }
    }

    #[test]
    fn disk_integral_off_center() {
        let (k, a) = (2.0, 0.05);
        for rho in [0.02, 0.2] {
            let exact = disk_integral(k, a, rho);
            let reference = polar_reference(k, a, rho);
            assert!(
                (exact - reference).norm() < 1e-6 * reference.norm(),
                "{rho}: {exact} {reference}"
            );
        }
    }

    #[test]
    fn disk_gradient_matches_difference_quotient() {
        let (k, a, rho) = (1.7, 0.08, 0.03);
        let h = 1e-6;
        let fd = (disk_integral(k, a, rho + h) - disk_integral(k, a, rho - h)) / (2.0 * h);
        let g = disk_gradient_factor(k, a, rho) * rho;
        assert!((fd - g).norm() < 1e-7);
    }

    #[test]
    fn trivial_index_gives_zero_operator() {
        let c = ParametricCurve::circle(Vec2::ZERO, 0.5, 64).unwrap();
        let mesh = crate::geometry::build_volume_mesh(&c, 0.1, &IndexField::constant(1.0)).unwrap();
        let op = assemble_volume_op(&mesh, 1.0, VolumeTargets::Nodes);
        for j in 0..mesh.len() {
            for i in 0..mesh.len() {
                assert_eq!(op.matrix[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn far_single_node_entry() {
        let mesh = VolumeMesh {
            kind: crate::geometry::MeshKind::Cartesian,
            nodes: vec![Vec2::ZERO],
            weights: vec![0.01],
            h: 0.1,
            n_values: vec![C64::new(2.0, 0.0)],
        };
        let p = [Vec2::new(3.0, 4.0)];
        let op = assemble_volume_op(&mesh, 1.3, VolumeTargets::Points(&p));
        let expect = 0.25 * I * h01(1.3 * 5.0).0 * (1.3 * 1.3) * 0.01;
        assert!((op.matrix[(0, 0)] - expect).norm() < 1e-16);
    }

    #[test]
    fn constant_index_disk_value() {
        // V 1 at (2, 0) for n = 2 on the disk of radius 0.5, k = 1:
        // ∫_{|y|<b} Φ(x, y) dy = (2π b J₁(kb)/k) Φ(x, 0)
        let c = ParametricCurve::circle(Vec2::ZERO, 0.5, 64).unwrap();
        let mesh = VolumeMesh::mapped_polar(&c, 0.05, &IndexField::constant(2.0)).unwrap();
        let p = [Vec2::new(2.0, 0.0)];
        let op = assemble_volume_op(&mesh, 1.0, VolumeTargets::Points(&p));
        let v = op.apply(&vec![C64::new(1.0, 0.0); mesh.len()])[0];
        let exact = disk_integral(1.0, 0.5, 2.0);
        assert!((v - exact).norm() < 1e-6 * exact.norm(), "{v} {exact}");
    }
}
