use std::time::Instant;

use super::{param, CheckReport};
use crate::error::{Error, Result};
use crate::geometry::{IndexField, ParametricCurve, Vec2, VolumeMesh};
use crate::solver::DensitySolution;
use crate::specialfn::bessel_j;
use crate::C64;

pub const GREEN_IDENTITY_TOLERANCE: f64 = 1e-6;

/// A field on the obstacle: values at mesh nodes, trace and normal
/// derivative at the nodes of `S₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorField {
    pub values: Vec<C64>,
    pub trace: Vec<C64>,
    pub normal_derivative: Vec<C64>,
}

impl InteriorField {
    /// `J₀(κ|x - c|)`, a solution of `Δw + κ² w = 0`.
    pub fn radial_mode(kappa: f64, center: Vec2, s1: &ParametricCurve, mesh: &VolumeMesh) -> Self {
        let values = mesh
            .nodes
            .iter()
            .map(|&x| C64::new(bessel_j(0, kappa * (x - center).norm()), 0.0))
            .collect();
        let (trace, normal_derivative) = s1
            .nodes()
            .iter()
            .map(|n| {
                let d = n.position - center;
                let r = d.norm();
                let dr = -kappa * bessel_j(1, kappa * r);
                let cos = d.dot(n.normal) / r;
                (
                    C64::new(bessel_j(0, kappa * r), 0.0),
                    C64::new(dr * cos, 0.0),
                )
            })
            .unzip();
        InteriorField {
            values,
            trace,
            normal_derivative,
        }
    }

    /// `w` of a solution, evaluated at the nodes of `mesh` through its
    /// representation, with traces from the jump relations.
    pub fn from_solution(sol: &DensitySolution, mesh: &VolumeMesh) -> Result<Self> {
        let values = sol.evaluate_field(&mesh.nodes, false)?.values;
        let (trace, normal_derivative) = sol.obstacle_traces()?;
        Ok(InteriorField {
            values,
            trace,
            normal_derivative,
        })
    }

    pub fn scaled(&self, s: C64) -> Self {
        let sc = |v: &[C64]| v.iter().map(|x| x * s).collect();
        InteriorField {
            values: sc(&self.values),
            trace: sc(&self.trace),
            normal_derivative: sc(&self.normal_derivative),
        }
    }
}

/// `D₁ = ∫_{Ω₂} (n - ñ) w w̃ dx` on the mesh and
/// `D₂ = k₂⁻² ∫_{S₁} (w ∂w̃/∂ν - w̃ ∂w/∂ν) ds` by the trapezoid rule.
pub fn green_identity_terms(
    k2: f64,
    n: &IndexField,
    n_tilde: &IndexField,
    s1: &ParametricCurve,
    mesh: &VolumeMesh,
    w: &InteriorField,
    wt: &InteriorField,
) -> Result<(C64, C64)> {
    let m = mesh.len();
    let b = s1.len();
    for f in [w, wt] {
        if f.values.len() != m || f.trace.len() != b || f.normal_derivative.len() != b {
            return Err(Error::InvalidInput(
                "interior fields do not match the mesh and S1".into(),
            ));
        }
    }
    let d1: C64 = (0..m)
        .map(|q| {
            let x = mesh.nodes[q];
            (n.eval(x) - n_tilde.eval(x)) * w.values[q] * wt.values[q] * mesh.weights[q]
        })
        .sum();
    let pw = s1.parameter_weight();
    let d2: C64 = s1
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            (w.trace[i] * wt.normal_derivative[i] - wt.trace[i] * w.normal_derivative[i])
                * (pw * node.jacobian)
        })
        .sum::<C64>()
        / (k2 * k2);
    Ok((d1, d2))
}

/// `|D₁ - D₂|`, the quadrature form of Green's identity behind the
/// orthogonality relation.
pub fn check_orthogonality_identity(
    k2: f64,
    n: &IndexField,
    n_tilde: &IndexField,
    s1: &ParametricCurve,
    mesh: &VolumeMesh,
    w: &InteriorField,
    wt: &InteriorField,
) -> Result<CheckReport> {
    let started = Instant::now();
    let (d1, d2) = green_identity_terms(k2, n, n_tilde, s1, mesh, w, wt)?;
    Ok(CheckReport::new(
        "green_identity",
        (d1 - d2).norm(),
        GREEN_IDENTITY_TOLERANCE,
        vec![
            param("d1", d1),
            param("d2", d2),
            param("nodes", mesh.len()),
            param("n1", s1.len()),
        ],
        started,
    ))
}
