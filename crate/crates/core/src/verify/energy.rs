use std::f64::consts::PI;
use std::time::Instant;

use super::{param, CheckReport};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::solver::{DensitySolution, IncidentField};

pub const FLUX_POINTS: usize = 512;
pub const LOSSLESS_TOLERANCE: f64 = 1e-6;
pub const LOSSY_TOLERANCE: f64 = 1e-3;

/// Both sides of `Im ∫_{|x|=R} u ∂ū/∂ν ds = -k₂² λ₀ λ₁ Im ∫_{Ω₂} n̄ |w|² dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub radius: f64,
    pub flux: f64,
    pub absorption: f64,
    pub lossless: bool,
}

/// Flux of the total field through the circle of radius `radius` about the
/// origin, and the absorption in the obstacle from the nodal `w`.
pub fn energy_balance(sol: &DensitySolution, radius: f64) -> Result<EnergyBalance> {
    let p = &sol.problem;
    let md = &p.medium;
    if !matches!(sol.incident, Some(IncidentField::PlaneWave { .. })) {
        return Err(Error::InvalidInput(
            "the energy identity is checked for plane waves".into(),
        ));
    }
    if p.s0.nodes().iter().any(|n| n.position.norm() >= radius) {
        return Err(Error::InvalidInput(format!(
            "circle of radius {radius} does not enclose S0"
        )));
    }
    let dirs: Vec<Vec2> = (0..FLUX_POINTS)
        .map(|i| Vec2::from_angle(2.0 * PI * i as f64 / FLUX_POINTS as f64))
        .collect();
    let pts: Vec<Vec2> = dirs.iter().map(|&e| e * radius).collect();
    let u = sol.evaluate_field(&pts, true)?.values;
    let g = sol.evaluate_gradient(&pts, true)?.values;
    let flux = u
        .iter()
        .zip(&g)
        .zip(&dirs)
        .map(|((u, g), e)| (u * (g[0] * e.x + g[1] * e.y).conj()).im)
        .sum::<f64>()
        * (2.0 * PI * radius / FLUX_POINTS as f64);
    let (absorption, lossless) = match &p.mesh {
        Some(mesh) => {
            let s: f64 = mesh
                .n_values
                .iter()
                .zip(&mesh.weights)
                .zip(&sol.w_grid)
                .map(|((n, wt), w)| (n.conj() * w.norm_sqr()).im * wt)
                .sum();
            let lossless = mesh.n_values.iter().all(|n| n.im == 0.0);
            (-md.k2 * md.k2 * md.lambda0 * md.lambda1 * s, lossless)
        }
        None => (0.0, true),
    };
    Ok(EnergyBalance {
        radius,
        flux,
        absorption,
        lossless,
    })
}

/// For real `n`: `|flux| / k₀` against `1e-6`. For absorbing `n`:
/// `|flux - absorption| / |absorption|` against `1e-3`, failing outright if
/// the absorption is negative.
pub fn check_energy(sol: &DensitySolution, radius: f64) -> Result<CheckReport> {
    let started = Instant::now();
    let b = energy_balance(sol, radius)?;
    let diff = (b.flux - b.absorption).abs();
    let (d, tol) = if b.lossless {
        (diff / sol.problem.medium.k0, LOSSLESS_TOLERANCE)
    } else if b.absorption >= 0.0 {
        (diff / b.absorption, LOSSY_TOLERANCE)
    } else {
        (f64::INFINITY, LOSSY_TOLERANCE)
    };
    Ok(CheckReport::new(
        "energy",
        d,
        tol,
        vec![
            param("radius", radius),
            param("flux", b.flux),
            param("absorption", b.absorption),
            param("lossless", b.lossless),
        ],
        started,
    ))
}
