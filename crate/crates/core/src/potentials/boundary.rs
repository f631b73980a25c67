use std::f64::consts::PI;

use faer::Mat;

use super::kernels::{self, h01};
use super::quadrature::{diff_entry, log_weights};
use crate::error::{Error, Result};
use crate::geometry::{min_node_distance, CurveNode, ParametricCurve, Vec2};
use crate::linalg::{build_matrix, matvec};
use crate::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Curves closer than this cannot be coupled by the plain trapezoid rule.
pub const MIN_CURVE_SEPARATION: f64 = 1e-10;

/// The four boundary integral operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// `S`: kernel `Φ(x, y)`.
    Single,
    /// `K`: kernel `∂Φ/∂ν(y)`.
    Double,
    /// `K′`: kernel `∂Φ/∂ν(x)`.
    AdjointDouble,
    /// `T`: kernel `∂²Φ/∂ν(x)∂ν(y)`.
    Hypersingular,
}

/// Nodal discretization of one boundary operator, quadrature weights folded in.
#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    pub kind: OperatorKind,
    pub k: f64,
    /// Source and target are the same curve (on-curve Nyström matrix).
    pub self_interaction: bool,
    /// `N_target × N_source`.
    pub matrix: Mat<C64>,
}

impl BoundaryOperator {
    pub fn apply(&self, density: &[C64]) -> Vec<C64> {
        matvec(self.matrix.as_ref(), density)
    }
}

/// Assemble `kind` with density on `source`, evaluated at the nodes of
/// `target` (`None` for the on-curve operator).
pub fn assemble_boundary_op(
    kind: OperatorKind,
    source: &ParametricCurve,
    target: Option<&ParametricCurve>,
    k: f64,
) -> Result<BoundaryOperator> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    let matrix = match target {
        None => self_matrix(kind, source, k),
        Some(t) => {
            let distance = min_node_distance(source, t);
            if distance < MIN_CURVE_SEPARATION {
                return Err(Error::SingularGeometry { distance });
            }
            cross_matrix(kind, source, t, k)
        }
    };
    Ok(BoundaryOperator {
        kind,
        k,
        self_interaction: target.is_none(),
        matrix,
    })
}

/// Plain trapezoid kernel between two distinct curves.
fn cross_matrix(
    kind: OperatorKind,
    source: &ParametricCurve,
    target: &ParametricCurve,
    k: f64,
) -> Mat<C64> {
    let w = source.parameter_weight();
    let src = source.nodes();
    let tgt = target.nodes();
    build_matrix(tgt.len(), src.len(), |i, j| {
        let (x, y) = (&tgt[i], &src[j]);
        let d = x.position - y.position;
        let kern = match kind {
            OperatorKind::Single => kernels::phi(k, d),
            OperatorKind::Double => kernels::double_layer(k, d, y.normal),
            OperatorKind::AdjointDouble => kernels::adjoint_double_layer(k, d, x.normal),
            OperatorKind::Hypersingular => kernels::hypersingular(k, d, x.normal, y.normal),
        };
        kern * (w * y.jacobian)
    })
}

fn self_matrix(kind: OperatorKind, curve: &ParametricCurve, k: f64) -> Mat<C64> {
    let nodes = curve.nodes();
    let n = nodes.len();
    let r = log_weights(n);
    let w = curve.parameter_weight();
    let entry =
        |i: usize, j: usize, split: &(dyn Fn(&CurveNode, &CurveNode) -> (C64, C64) + Sync)| {
            let (l1, l2) = split(&nodes[i], &nodes[j]);
            r[(i + n - j) % n] * l1 + w * l2
        };
    match kind {
        OperatorKind::Single => build_matrix(n, n, |i, j| {
            entry(i, j, &|x, y| single_split(k, x, y, true))
        }),
        OperatorKind::Double => {
            build_matrix(n, n, |i, j| entry(i, j, &|x, y| double_split(k, x, y)))
        }
        OperatorKind::AdjointDouble => {
            build_matrix(n, n, |i, j| entry(i, j, &|x, y| adjoint_split(k, x, y)))
        }
        OperatorKind::Hypersingular => {
            // Maue: T = (d/ds) S (d/ds) + k² ν·S(ν ·)
            let s0 = build_matrix(n, n, |i, j| {
                entry(i, j, &|x, y| single_split(k, x, y, false))
            });
            let s = build_matrix(n, n, |i, j| {
                entry(i, j, &|x, y| single_split(k, x, y, true))
            });
            let dm = build_matrix(n, n, |i, j| C64::new(diff_entry(n, i, j), 0.0));
            let tangential = &dm * &s0 * &dm;
            build_matrix(n, n, |i, j| {
                tangential[(i, j)] / nodes[i].jacobian
                    + k * k * nodes[i].normal.dot(nodes[j].normal) * s[(i, j)]
            })
        }
    }
}

fn log_factor(x: &CurveNode, y: &CurveNode) -> f64 {
    (4.0 * (0.5 * (x.t - y.t)).sin().powi(2)).ln()
}

/// `(L1, L2)` for the single layer; `with_jacobian = false` gives the kernel
/// in the parameter variable without the source speed.
fn single_split(k: f64, x: &CurveNode, y: &CurveNode, with_jacobian: bool) -> (C64, C64) {
    let scale = if with_jacobian { y.jacobian } else { 1.0 };
    if std::ptr::eq(x, y) {
        let l2 = 0.25 * I - EULER_GAMMA / (2.0 * PI) - (0.5 * k * x.jacobian).ln() / (2.0 * PI);
        return (C64::new(-scale / (4.0 * PI), 0.0), l2 * scale);
    }
    let d = x.position - y.position;
    let (h0, _) = h01(k * d.norm());
    let l = 0.25 * I * h0 * scale;
    let l1 = C64::new(-h0.re * scale / (4.0 * PI), 0.0);
    (l1, l - l1 * log_factor(x, y))
}

fn double_split(k: f64, x: &CurveNode, y: &CurveNode) -> (C64, C64) {
    if std::ptr::eq(x, y) {
        return (
            C64::new(0.0, 0.0),
            C64::new(-y.curvature() * y.jacobian / (4.0 * PI), 0.0),
        );
    }
    let d = x.position - y.position;
    let rr = d.norm();
    let (_, h1) = h01(k * rr);
    let c = y.normal.dot(d) / rr * y.jacobian;
    let l = 0.25 * I * k * h1 * c;
    let l1 = C64::new(-k / (4.0 * PI) * h1.re * c, 0.0);
    (l1, l - l1 * log_factor(x, y))
}

fn adjoint_split(k: f64, x: &CurveNode, y: &CurveNode) -> (C64, C64) {
    if std::ptr::eq(x, y) {
        return (
            C64::new(0.0, 0.0),
            C64::new(-x.curvature() * x.jacobian / (4.0 * PI), 0.0),
        );
    }
    let d = x.position - y.position;
    let rr = d.norm();
    let (_, h1) = h01(k * rr);
    let c = x.normal.dot(d) / rr * y.jacobian;
    let l = -0.25 * I * k * h1 * c;
    let l1 = C64::new(k / (4.0 * PI) * h1.re * c, 0.0);
    (l1, l - l1 * log_factor(x, y))
}

/// Trapezoid sum of the off-curve kernel of `kind` at `target` with the
/// given target normal (ignored for `Single` and `Double`).
pub(crate) fn off_curve_row(
    kind: OperatorKind,
    source: &ParametricCurve,
    k: f64,
    target: Vec2,
    target_normal: Vec2,
) -> Vec<C64> {
    let w = source.parameter_weight();
    source
        .nodes()
        .iter()
        .map(|y| {
            let d = target - y.position;
            let kern = match kind {
                OperatorKind::Single => kernels::phi(k, d),
                OperatorKind::Double => kernels::double_layer(k, d, y.normal),
                OperatorKind::AdjointDouble => kernels::adjoint_double_layer(k, d, target_normal),
                OperatorKind::Hypersingular => {
                    kernels::hypersingular(k, d, target_normal, y.normal)
                }
            };
            kern * (w * y.jacobian)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::{bessel_j, hankel1};

    fn jp(m: u32, x: f64) -> f64 {
        if m == 0 {
            -bessel_j(1, x)
        } else {
            0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
        }
    }

    fn hp(m: u32, x: f64) -> C64 {
        if m == 0 {
            -hankel1(1, x).unwrap()
        } else {
            0.5 * (hankel1(m - 1, x).unwrap() - hankel1(m + 1, x).unwrap())
        }
    }

    fn eigen_error(kind: OperatorKind, a: f64, k: f64, n: usize, m: u32) -> f64 {
        let c = ParametricCurve::circle(Vec2::new(0.3, -0.2), a, n).unwrap();
        let op = assemble_boundary_op(kind, &c, None, k).unwrap();
        let x = k * a;
        let (j, h) = (bessel_j(m, x), hankel1(m, x).unwrap());
        let lambda = match kind {
            OperatorKind::Single => 0.5 * I * PI * a * j * h,
            OperatorKind::Double | OperatorKind::AdjointDouble => {
                0.25 * I * PI * a * k * (jp(m, x) * h + j * hp(m, x))
            }
            OperatorKind::Hypersingular => 0.5 * I * PI * a * k * k * jp(m, x) * hp(m, x),
        };
        let dens: Vec<C64> = c
            .nodes()
            .iter()
            .map(|p| C64::from_polar(1.0, m as f64 * p.t))
            .collect();
        let out = op.apply(&dens);
        out.iter()
            .zip(&dens)
            .map(|(o, d)| (o - lambda * d).norm() / lambda.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn circle_eigenvalues() {
        for kind in [
            OperatorKind::Single,
            OperatorKind::Double,
            OperatorKind::AdjointDouble,
            OperatorKind::Hypersingular,
        ] {
            for (a, k) in [(1.0, 1.0), (0.7, 2.5), (1.5, 1.5)] {
                for m in 0..=5 {
                    let e = eigen_error(kind, a, k, 64, m);
                    assert!(e < 1e-10, "{kind:?} a={a} k={k} m={m}: {e:e}");
                }
            }
        }
    }

    #[test]
    fn off_curve_entries_are_trapezoid_sums() {
        let s = ParametricCurve::circle(Vec2::ZERO, 0.7, 16).unwrap();
        let t = ParametricCurve::circle(Vec2::ZERO, 1.5, 12).unwrap();
        let op = assemble_boundary_op(OperatorKind::Double, &s, Some(&t), 2.0).unwrap();
        assert_eq!((op.matrix.nrows(), op.matrix.ncols()), (12, 16));
        for i in 0..12 {
            for j in 0..16 {
                let x = t.nodes()[i].position;
                let y = &s.nodes()[j];
                let d = x - y.position;
                let r = d.norm();
                let direct = I * 2.0 / 4.0 * hankel1(1, 2.0 * r).unwrap() * y.normal.dot(d) / r
                    * (2.0 * PI / 16.0)
                    * 0.7;
                assert!((op.matrix[(i, j)] - direct).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn small_wavenumber_stays_finite() {
        let c = ParametricCurve::circle(Vec2::ZERO, 1.0, 32).unwrap();
        let op = assemble_boundary_op(OperatorKind::Single, &c, None, 1e-3).unwrap();
        for j in 0..32 {
            for i in 0..32 {
                assert!(op.matrix[(i, j)].re.is_finite() && op.matrix[(i, j)].im.is_finite());
            }
        }
    }

    #[test]
    fn touching_curves_are_rejected() {
        let a = ParametricCurve::circle(Vec2::ZERO, 1.0, 32).unwrap();
        let b = ParametricCurve::circle(Vec2::new(2.0, 0.0), 1.0, 32).unwrap();
        assert!(matches!(
            assemble_boundary_op(OperatorKind::Single, &a, Some(&b), 1.0),
            Err(Error::SingularGeometry { .. })
        ));
    }

    #[test]
    fn single_layer_is_complex_symmetric_on_circles() {
        let c = ParametricCurve::circle(Vec2::ZERO, 0.9, 48).unwrap();
        let op = assemble_boundary_op(OperatorKind::Single, &c, None, 1.7).unwrap();
        for i in 0..48 {
            for j in 0..48 {
                assert!((op.matrix[(i, j)] - op.matrix[(j, i)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_convergence_on_an_ellipse() {
        use crate::geometry::CurveShape;
        // smooth density, compare against a fine reference at the shared nodes
        let shape = CurveShape::Ellipse {
            semi_axes: [1.0, 0.6],
        };
        let k = 2.0;
        for kind in [
            OperatorKind::Single,
            OperatorKind::Double,
            OperatorKind::AdjointDouble,
            OperatorKind::Hypersingular,
        ] {
            let apply = |n: usize| {
                let c = ParametricCurve::new(shape.clone(), Vec2::ZERO, n).unwrap();
                let op = assemble_boundary_op(kind, &c, None, k).unwrap();
                let dens: Vec<C64> = c
                    .nodes()
                    .iter()
                    .map(|p| C64::new((p.t.cos()).exp(), p.t.sin()))
                    .collect();
                op.apply(&dens)
            };
            let reference = apply(256);
            let errs: Vec<f64> = [16usize, 32, 64]
                .iter()
                .map(|&n| {
                    let v = apply(n);
                    let stride = 256 / n;
                    v.iter()
                        .enumerate()
                        .map(|(i, x)| (x - reference[i * stride]).norm())
                        .fold(0.0, f64::max)
                })
                .collect();
            for p in errs.windows(2) {
                assert!(p[1] < 1e-12 || p[0] / p[1] > 10.0, "{kind:?}: {errs:?}");
            }
        }
    }
}
