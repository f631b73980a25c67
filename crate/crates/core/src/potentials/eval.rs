use rayon::prelude::*;

use super::boundary::{off_curve_row, OperatorKind};
use super::kernels;
use crate::geometry::{ParametricCurve, Vec2};
use crate::linalg::build_matrix;
use crate::C64;

/// Layer potentials that can be evaluated away from the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Single,
    Double,
}

/// Points closer than this many node spacings are flagged as inaccurate.
pub const SAFE_DISTANCE_FACTOR: f64 = 3.0;

/// Field values plus the indices of points that violated the distance
/// precondition. Such values are still computed; they are just less accurate.
#[derive(Debug, Clone, Default)]
pub struct Evaluation<T> {
    pub values: Vec<T>,
    pub too_close: Vec<usize>,
}

fn too_close(source: &ParametricCurve, points: &[Vec2]) -> Vec<usize> {
    let limit = SAFE_DISTANCE_FACTOR * source.node_spacing();
    let flagged: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| source.distance_to(**p) < limit)
        .map(|(i, _)| i)
        .collect();
    if !flagged.is_empty() {
        log::warn!(
            "{} evaluation point(s) closer than {limit:.3e} to the source curve",
            flagged.len()
        );
    }
    flagged
}

/// Trapezoid-rule evaluation of the single or double layer potential with
/// nodal `density` on `source` at each of `points`.
pub fn evaluate_layer_potential(
    kind: LayerKind,
    source: &ParametricCurve,
    density: &[C64],
    k: f64,
    points: &[Vec2],
) -> Evaluation<C64> {
    assert_eq!(density.len(), source.len());
    let op = match kind {
        LayerKind::Single => OperatorKind::Single,
        LayerKind::Double => OperatorKind::Double,
    };
    let values = points
        .par_iter()
        .map(|&p| {
            off_curve_row(op, source, k, p, Vec2::ZERO)
                .iter()
                .zip(density)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    Evaluation {
        values,
        too_close: too_close(source, points),
    }
}

/// Matrix of the off-curve layer potential: row `i` maps nodal densities to
/// the potential at `points[i]`.
pub fn layer_potential_matrix(
    kind: LayerKind,
    source: &ParametricCurve,
    k: f64,
    points: &[Vec2],
) -> faer::Mat<C64> {
    let op = match kind {
        LayerKind::Single => OperatorKind::Single,
        LayerKind::Double => OperatorKind::Double,
    };
    let w = source.parameter_weight();
    let nodes = source.nodes();
    build_matrix(points.len(), nodes.len(), |i, j| {
        let y = &nodes[j];
        let d = points[i] - y.position;
        let kern = match op {
            OperatorKind::Single => kernels::phi(k, d),
            _ => kernels::double_layer(k, d, y.normal),
        };
        kern * (w * y.jacobian)
    })
}

/// Gradient of the layer potential at each point.
pub fn evaluate_layer_gradient(
    kind: LayerKind,
    source: &ParametricCurve,
    density: &[C64],
    k: f64,
    points: &[Vec2],
) -> Evaluation<[C64; 2]> {
    assert_eq!(density.len(), source.len());
    let w = source.parameter_weight();
    let values = points
        .par_iter()
        .map(|&p| {
            let mut acc = [C64::new(0.0, 0.0); 2];
            for (y, f) in source.nodes().iter().zip(density) {
                let d = p - y.position;
                let g = match kind {
                    LayerKind::Single => kernels::grad_phi(k, d),
                    LayerKind::Double => kernels::grad_double_layer(k, d, y.normal),
                };
                let s = f * (w * y.jacobian);
                acc[0] += g[0] * s;
                acc[1] += g[1] * s;
            }
            acc
        })
        .collect();
    Evaluation {
        values,
        too_close: too_close(source, points),
    }
}
