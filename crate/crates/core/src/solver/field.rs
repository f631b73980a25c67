use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::system::DensitySolution;
use crate::error::Result;
use crate::geometry::{classify_point, LayerId, Vec2};
use crate::potentials::{
    assemble_boundary_op, contrast, evaluate_layer_gradient, evaluate_layer_potential,
    volume_entry, volume_gradient_entry, volume_normal_entry, Evaluation, LayerKind, OperatorKind,
};
use crate::{far_field_constant, C64};

/// Far-field samples `u∞(x̂(θ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    pub angles: Vec<f64>,
    pub values: Vec<C64>,
}

impl FarField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `u∞(x̂) = γ₀ ∫_{S₀} [λ₀ ∂e^{-ik₀x̂·y}/∂ν(y) ψ₀(y) + e^{-ik₀x̂·y} φ₀(y)] ds(y)`.
pub fn far_field(sol: &DensitySolution, angles: &[f64]) -> FarField {
    let md = &sol.problem.medium;
    let s0 = &sol.problem.s0;
    let k0 = md.k0;
    let gamma = far_field_constant(k0);
    let w = s0.parameter_weight();
    let values = angles
        .iter()
        .map(|&theta| {
            let xh = Vec2::from_angle(theta);
            let sum: C64 = s0
                .nodes()
                .iter()
                .zip(sol.psi0.iter().zip(&sol.phi0))
                .map(|(y, (psi, phi))| {
                    let e = C64::from_polar(1.0, -k0 * xh.dot(y.position));
                    let de = C64::new(0.0, -k0 * xh.dot(y.normal)) * e;
                    (md.lambda0 * de * psi + e * phi) * (w * y.jacobian)
                })
                .sum();
            gamma * sum
        })
        .collect();
    FarField {
        angles: angles.to_vec(),
        values,
    }
}

fn add(a: &mut [C64], b: &[C64], s: f64) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y * s;
    }
}

fn add_grad(a: &mut [[C64; 2]], b: &[[C64; 2]], s: f64) {
    for (x, y) in a.iter_mut().zip(b) {
        x[0] += y[0] * s;
        x[1] += y[1] * s;
    }
}

impl DensitySolution {
    pub fn far_field(&self, angles: &[f64]) -> FarField {
        far_field(self, angles)
    }

    fn group(&self, points: &[Vec2]) -> Result<[Vec<usize>; 3]> {
        let p = &self.problem;
        let mut groups: [Vec<usize>; 3] = Default::default();
        for (i, &x) in points.iter().enumerate() {
            groups[classify_point(x, &p.s0, &p.s1)?.index()].push(i);
        }
        Ok(groups)
    }

    fn adds_incident(&self, layer: LayerId, total: bool) -> bool {
        total && self.incident.is_some_and(|inc| inc.layer() == layer)
    }

    /// Field at each point: `u^s` (or total `u` with `total`) in the exterior,
    /// `v` in the layer (plus the source field for a layer point source with
    /// `total`), `w` in the obstacle.
    pub fn evaluate_field(&self, points: &[Vec2], total: bool) -> Result<Evaluation<C64>> {
        let p = &self.problem;
        let md = &p.medium;
        let groups = self.group(points)?;
        let mut values = vec![C64::new(0.0, 0.0); points.len()];
        let mut too_close = Vec::new();
        for layer in [LayerId::Exterior, LayerId::Layer, LayerId::Obstacle] {
            let idx = &groups[layer.index()];
            if idx.is_empty() {
                continue;
            }
            let pts: Vec<Vec2> = idx.iter().map(|&i| points[i]).collect();
            let mut acc = vec![C64::new(0.0, 0.0); pts.len()];
            let mut terms = |kind, curve, density: &[C64], k, s: f64| {
                let ev = evaluate_layer_potential(kind, curve, density, k, &pts);
                add(&mut acc, &ev.values, s);
                too_close.extend(ev.too_close.iter().map(|&j| idx[j]));
            };
            match layer {
                LayerId::Exterior => {
                    terms(LayerKind::Double, &p.s0, &self.psi0, md.k0, md.lambda0);
                    terms(LayerKind::Single, &p.s0, &self.phi0, md.k0, 1.0);
                }
                LayerId::Layer => {
                    terms(LayerKind::Double, &p.s0, &self.psi0, md.k1, 1.0);
                    terms(LayerKind::Single, &p.s0, &self.phi0, md.k1, 1.0);
                    terms(LayerKind::Double, &p.s1, &self.psi1, md.k1, md.lambda1);
                    terms(LayerKind::Single, &p.s1, &self.phi1, md.k1, 1.0);
                }
                LayerId::Obstacle => {
                    terms(LayerKind::Double, &p.s1, &self.psi1, md.k2, 1.0);
                    terms(LayerKind::Single, &p.s1, &self.phi1, md.k2, 1.0);
                    if let Some(mesh) = &p.mesh {
                        let c = contrast(mesh, md.k2);
                        let vol: Vec<C64> = pts
                            .par_iter()
                            .map(|&x| {
                                (0..mesh.len())
                                    .map(|q| {
                                        volume_entry(mesh, &c, md.k2, x, q, false) * self.w_grid[q]
                                    })
                                    .sum()
                            })
                            .collect();
                        add(&mut acc, &vol, 1.0);
                    }
                }
            }
            if self.adds_incident(layer, total) {
                let inc = self.incident.expect("checked above");
                for (a, x) in acc.iter_mut().zip(&pts) {
                    *a += inc.value(md, *x);
                }
            }
            for (a, &i) in acc.into_iter().zip(idx) {
                values[i] = a;
            }
        }
        too_close.sort_unstable();
        too_close.dedup();
        Ok(Evaluation { values, too_close })
    }

    /// Gradient of the field returned by [`Self::evaluate_field`].
    pub fn evaluate_gradient(&self, points: &[Vec2], total: bool) -> Result<Evaluation<[C64; 2]>> {
        let p = &self.problem;
        let md = &p.medium;
        let groups = self.group(points)?;
        let zero = [C64::new(0.0, 0.0); 2];
        let mut values = vec![zero; points.len()];
        let mut too_close = Vec::new();
        for layer in [LayerId::Exterior, LayerId::Layer, LayerId::Obstacle] {
            let idx = &groups[layer.index()];
            if idx.is_empty() {
                continue;
            }
            let pts: Vec<Vec2> = idx.iter().map(|&i| points[i]).collect();
            let mut acc = vec![zero; pts.len()];
            let mut terms = |kind, curve, density: &[C64], k, s: f64| {
                let ev = evaluate_layer_gradient(kind, curve, density, k, &pts);
                add_grad(&mut acc, &ev.values, s);
                too_close.extend(ev.too_close.iter().map(|&j| idx[j]));
            };
            match layer {
                LayerId::Exterior => {
                    terms(LayerKind::Double, &p.s0, &self.psi0, md.k0, md.lambda0);
                    terms(LayerKind::Single, &p.s0, &self.phi0, md.k0, 1.0);
                }
                LayerId::Layer => {
                    terms(LayerKind::Double, &p.s0, &self.psi0, md.k1, 1.0);
                    terms(LayerKind::Single, &p.s0, &self.phi0, md.k1, 1.0);
                    terms(LayerKind::Double, &p.s1, &self.psi1, md.k1, md.lambda1);
                    terms(LayerKind::Single, &p.s1, &self.phi1, md.k1, 1.0);
                }
                LayerId::Obstacle => {
                    terms(LayerKind::Double, &p.s1, &self.psi1, md.k2, 1.0);
                    terms(LayerKind::Single, &p.s1, &self.phi1, md.k2, 1.0);
                    if let Some(mesh) = &p.mesh {
                        let c = contrast(mesh, md.k2);
                        let vol: Vec<[C64; 2]> = pts
                            .par_iter()
                            .map(|&x| {
                                let mut g = zero;
                                for q in 0..mesh.len() {
                                    let e = volume_gradient_entry(mesh, &c, md.k2, x, q);
                                    g[0] += e[0] * self.w_grid[q];
                                    g[1] += e[1] * self.w_grid[q];
                                }
                                g
                            })
                            .collect();
                        add_grad(&mut acc, &vol, 1.0);
                    }
                }
            }
            if self.adds_incident(layer, total) {
                let inc = self.incident.expect("checked above");
                for (a, x) in acc.iter_mut().zip(&pts) {
                    let g = inc.gradient(md, *x);
                    a[0] += g[0];
                    a[1] += g[1];
                }
            }
            for (a, &i) in acc.into_iter().zip(idx) {
                values[i] = a;
            }
        }
        too_close.sort_unstable();
        too_close.dedup();
        Ok(Evaluation { values, too_close })
    }

    /// Interior traces `(w, ∂w/∂ν)` at the nodes of `S₁`, from the
    /// representation of `w` and the jump relations.
    pub fn obstacle_traces(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let p = &self.problem;
        let k2 = p.medium.k2;
        let op = |kind| assemble_boundary_op(kind, &p.s1, None, k2).map(|o| o.matrix);
        let n1 = p.s1.len();
        let mut w = vec![C64::new(0.0, 0.0); n1];
        let mut dw = vec![C64::new(0.0, 0.0); n1];
        let apply = |m: &faer::Mat<C64>, x: &[C64], out: &mut [C64]| {
            for (i, o) in out.iter_mut().enumerate() {
                *o += (0..x.len()).map(|j| m[(i, j)] * x[j]).sum::<C64>();
            }
        };
        apply(&op(OperatorKind::Double)?, &self.psi1, &mut w);
        apply(&op(OperatorKind::Single)?, &self.phi1, &mut w);
        apply(&op(OperatorKind::Hypersingular)?, &self.psi1, &mut dw);
        apply(&op(OperatorKind::AdjointDouble)?, &self.phi1, &mut dw);
        for i in 0..n1 {
            w[i] -= 0.5 * self.psi1[i];
            dw[i] += 0.5 * self.phi1[i];
        }
        if let Some(mesh) = &p.mesh {
            let c = contrast(mesh, k2);
            let nodes = p.s1.nodes();
            let vol: Vec<(C64, C64)> = nodes
                .par_iter()
                .map(|n| {
                    let mut v = C64::new(0.0, 0.0);
                    let mut dv = C64::new(0.0, 0.0);
                    for q in 0..mesh.len() {
                        v += volume_entry(mesh, &c, k2, n.position, q, false) * self.w_grid[q];
                        dv += volume_normal_entry(mesh, &c, k2, n.position, n.normal, q)
                            * self.w_grid[q];
                    }
                    (v, dv)
                })
                .collect();
            for (i, (v, dv)) in vol.into_iter().enumerate() {
                w[i] += v;
                dw[i] += dv;
            }
        }
        Ok((w, dw))
    }
}
