use std::f64::consts::PI;
use std::time::Instant;

use super::{normalized, param, CheckReport};
use crate::error::{Error, Result};
use crate::geometry::{classify_point, LayerId, Vec2};
use crate::solver::{IncidentField, TransmissionSolver};
use crate::{far_field_constant, C64};

pub const MIXED_RECIPROCITY_TOLERANCE: f64 = 1e-5;
pub const RECIPROCITY_TOLERANCE: f64 = 1e-6;

/// `(Φ∞(x̂, z), c·u(z, -x̂))` where the right side is `γ₀ u^s` for `z` in
/// the exterior and `λ₀ γ₀ v` for `z` in the layer.
pub fn mixed_reciprocity_pair(
    solver: &TransmissionSolver,
    z: Vec2,
    xhat: Vec2,
) -> Result<(C64, C64)> {
    let p = solver.problem();
    let md = &p.medium;
    let layer = classify_point(z, &p.s0, &p.s1)?;
    if layer == LayerId::Obstacle {
        return Err(Error::InvalidInput(
            "mixed reciprocity needs z outside the obstacle".into(),
        ));
    }
    let xhat = xhat.unit();
    let source = IncidentField::PointSource { location: z, layer };
    let lhs = solver.solve(&source)?.far_field(&[xhat.angle()]).values[0];
    let wave = IncidentField::PlaneWave { direction: -xhat };
    let field = solver.solve(&wave)?.evaluate_field(&[z], false)?.values[0];
    let gamma = far_field_constant(md.k0);
    let rhs = match layer {
        LayerId::Exterior => gamma * field,
        _ => md.lambda0 * gamma * field,
    };
    Ok((lhs, rhs))
}

/// `|Φ∞(x̂, z) - c·u(z, -x̂)|` normalized by the larger side.
pub fn check_mixed_reciprocity(
    solver: &TransmissionSolver,
    z: Vec2,
    xhat: Vec2,
) -> Result<CheckReport> {
    let started = Instant::now();
    let (lhs, rhs) = mixed_reciprocity_pair(solver, z, xhat)?;
    let d = normalized((lhs - rhs).norm(), lhs.norm().max(rhs.norm()));
    let lay = solver.layout();
    Ok(CheckReport::new(
        "mixed_reciprocity",
        d,
        MIXED_RECIPROCITY_TOLERANCE,
        vec![
            param("z", format!("({}, {})", z.x, z.y)),
            param("xhat", format!("({}, {})", xhat.x, xhat.y)),
            param("n0", lay.n0),
            param("n1", lay.n1),
            param("m", lay.m),
        ],
        started,
    ))
}

/// `table[j][i] = u∞(x̂(θᵢ), d(θⱼ))` for plane waves from every angle.
pub fn far_field_table(solver: &TransmissionSolver, angles: &[f64]) -> Result<Vec<Vec<C64>>> {
    angles
        .iter()
        .map(|&t| {
            Ok(solver
                .solve(&IncidentField::plane_wave(t))?
                .far_field(angles)
                .values)
        })
        .collect()
}

/// `max |u∞(x̂, d) - u∞(-d, -x̂)| / max |u∞|` over all pairs from `angles`.
pub fn check_reciprocity(solver: &TransmissionSolver, angles: &[f64]) -> Result<CheckReport> {
    let started = Instant::now();
    if angles.len() < 2 {
        return Err(Error::InvalidInput(
            "reciprocity needs at least two directions".into(),
        ));
    }
    let n = angles.len();
    let all: Vec<f64> = angles
        .iter()
        .copied()
        .chain(angles.iter().map(|t| t + PI))
        .collect();
    let table = far_field_table(solver, &all)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let forward = table[b][a];
            let backward = table[a + n][b + n];
            worst = worst.max((forward - backward).norm());
            scale = scale.max(forward.norm()).max(backward.norm());
        }
    }
    let lay = solver.layout();
    Ok(CheckReport::new(
        "reciprocity",
        normalized(worst, scale),
        RECIPROCITY_TOLERANCE,
        vec![
            param("directions", n),
            param("n0", lay.n0),
            param("n1", lay.n1),
            param("m", lay.m),
        ],
        started,
    ))
}
