use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{param, CheckReport};
use crate::error::{Error, Result};
use crate::geometry::{build_volume_mesh, IndexField, ParametricCurve, Vec2};
use crate::oracle::{ls_reference_extrapolated, series_far_field, ConcentricConfig, LsGrid};
use crate::solver::{
    incident_to_data, solve_direct, IncidentField, MediumConfig, TransmissionSolver,
};
use crate::C64;

pub const FAR_FIELD_SAMPLES: usize = 64;
pub const SPECTRAL_RATIO: f64 = 10.0;
pub const ERROR_FLOOR: f64 = 1e-10;
pub const VOLUME_ORDER: f64 = 1.5;
pub const STABILITY_LIMIT: f64 = 1e3;

fn sample_angles() -> Vec<f64> {
    (0..FAR_FIELD_SAMPLES)
        .map(|i| 2.0 * PI * i as f64 / FAR_FIELD_SAMPLES as f64)
        .collect()
}

fn relative_error(a: &[C64], b: &[C64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Transparent-interface configuration with a compactly supported index,
/// compared against the grid Lippmann-Schwinger reference.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeBenchmark {
    pub k: f64,
    pub index: IndexField,
    pub r0: f64,
    pub r1: f64,
    pub boundary_nodes: usize,
    pub incidence: f64,
}

impl VolumeBenchmark {
    /// `k = 1`, circles 1.5 and 0.7, bump of height 0.4 and radius 0.5.
    pub fn standard() -> Self {
        VolumeBenchmark {
            k: 1.0,
            index: IndexField::RadialBump {
                center: Vec2::ZERO,
                radius: 0.5,
                amplitude: C64::new(0.4, 0.0),
            },
            r0: 1.5,
            r1: 0.7,
            boundary_nodes: 64,
            incidence: 0.0,
        }
    }

    pub fn medium(&self) -> MediumConfig {
        MediumConfig::new([self.k; 3], 1.0, 1.0).with_index(self.index.clone())
    }
}

/// Maximal relative far-field error against the series for each `N`.
pub fn boundary_convergence(
    cfg: &ConcentricConfig,
    inc: &IncidentField,
    ns: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let angles = sample_angles();
    let reference = series_far_field(cfg, inc, &angles)?;
    let md = &cfg.medium;
    if !md.index.is_trivial() {
        return Err(Error::InvalidInput(
            "boundary convergence needs n = 1".into(),
        ));
    }
    ns.iter()
        .map(|&n| {
            let s0 = ParametricCurve::circle(Vec2::ZERO, cfg.r0, n)?;
            let s1 = ParametricCurve::circle(Vec2::ZERO, cfg.r1, n)?;
            let sol = solve_direct(inc, md, &s0, &s1, None)?;
            Ok((
                n,
                relative_error(&sol.far_field(&angles).values, &reference.values),
            ))
        })
        .collect()
}

/// Maximal relative far-field error against the extrapolated grid reference
/// at spacing `min(hs)/2` for each mesh spacing.
pub fn volume_convergence(bench: &VolumeBenchmark, hs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let angles = sample_angles();
    let finest = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let grid = LsGrid::for_index(&bench.index, 0.5 * finest)?;
    let dir = Vec2::from_angle(bench.incidence);
    let reference = ls_reference_extrapolated(&grid, bench.k, &bench.index, dir, &angles)?;
    let md = bench.medium();
    let s0 = ParametricCurve::circle(Vec2::ZERO, bench.r0, bench.boundary_nodes)?;
    let s1 = ParametricCurve::circle(Vec2::ZERO, bench.r1, bench.boundary_nodes)?;
    let inc = IncidentField::plane_wave(bench.incidence);
    hs.iter()
        .map(|&h| {
            let mesh = build_volume_mesh(&s1, h, &bench.index)?;
            let sol = solve_direct(&inc, &md, &s0, &s1, Some(&mesh))?;
            Ok((
                h,
                relative_error(&sol.far_field(&angles).values, &reference.values),
            ))
        })
        .collect()
}

/// Response of the far field to a perturbation of `f` of sup-norm `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityProbe {
    pub epsilon: f64,
    pub response: f64,
    /// `response / epsilon`.
    pub constant: f64,
}

/// Perturbs `f` by `epsilon` times seeded random unimodular nodal values.
pub fn stability_probe(
    solver: &TransmissionSolver,
    inc: &IncidentField,
    epsilon: f64,
    seed: u64,
) -> Result<StabilityProbe> {
    let p = solver.problem();
    let data = incident_to_data(inc, &p.medium, &p.s0, &p.s1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturbed = data.clone();
    for f in perturbed.f.iter_mut() {
        *f += C64::from_polar(epsilon, rng.random_range(0.0..2.0 * PI));
    }
    let angles = sample_angles();
    let a = solver
        .solve_data(&data, Some(*inc))?
        .far_field(&angles)
        .values;
    let b = solver
        .solve_data(&perturbed, Some(*inc))?
        .far_field(&angles)
        .values;
    let response = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    Ok(StabilityProbe {
        epsilon,
        response,
        constant: response / epsilon,
    })
}

/// Shortfall of the error reduction below `min_ratio` per refinement step,
/// ignoring steps whose finer error is already at `floor`.
pub fn check_refinement_ratio(
    name: &str,
    errors: &[f64],
    min_ratio: f64,
    floor: f64,
) -> CheckReport {
    let started = Instant::now();
    let shortfall = errors
        .windows(2)
        .filter(|w| w[1] > floor)
        .map(|w| (min_ratio - w[0] / w[1]).max(0.0))
        .fold(0.0, f64::max);
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:e}")).collect();
    CheckReport::new(
        name,
        shortfall,
        0.0,
        vec![
            param("errors", shown.join(" ")),
            param("min_ratio", min_ratio),
            param("floor", floor),
        ],
        started,
    )
}

/// Shortfall of the observed order `log₂(e(h)/e(h/2))` below `min_order`
/// for `(h, error)` rows with halving spacings.
pub fn check_refinement_order(name: &str, rows: &[(f64, f64)], min_order: f64) -> CheckReport {
    let started = Instant::now();
    let orders: Vec<f64> = rows
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    let shortfall = orders
        .iter()
        .map(|o| (min_order - o).max(0.0))
        .fold(0.0, f64::max);
    let shown: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
    CheckReport::new(
        name,
        if orders.iter().any(|o| o.is_nan()) {
            f64::NAN
        } else {
            shortfall
        },
        0.0,
        vec![
            param("orders", shown.join(" ")),
            param("min_order", min_order),
        ],
        started,
    )
}

/// Boundary and volume convergence tables with the stability probe.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub boundary: Vec<(usize, f64)>,
    pub volume: Vec<(f64, f64)>,
    pub stability: StabilityProbe,
    pub reports: Vec<CheckReport>,
}

pub fn convergence_study(
    cfg: &ConcentricConfig,
    ns: &[usize],
    bench: &VolumeBenchmark,
    hs: &[f64],
    epsilon: f64,
    seed: u64,
) -> Result<ConvergenceStudy> {
    let inc = IncidentField::plane_wave(0.0);
    let boundary = boundary_convergence(cfg, &inc, ns)?;
    let volume = volume_convergence(bench, hs)?;
    let n = ns.iter().copied().min().unwrap_or(64).max(64);
    let problem = crate::solver::Problem::new(
        cfg.medium.clone(),
        ParametricCurve::circle(Vec2::ZERO, cfg.r0, n)?,
        ParametricCurve::circle(Vec2::ZERO, cfg.r1, n)?,
        None,
    )?;
    let started = Instant::now();
    let stability = stability_probe(&TransmissionSolver::new(problem)?, &inc, epsilon, seed)?;
    let errors: Vec<f64> = boundary.iter().map(|r| r.1).collect();
    let reports = vec![
        check_refinement_ratio("boundary_convergence", &errors, SPECTRAL_RATIO, ERROR_FLOOR),
        check_refinement_order("volume_convergence", &volume, VOLUME_ORDER),
        CheckReport::new(
            "stability",
            stability.constant,
            STABILITY_LIMIT,
            vec![param("epsilon", epsilon), param("seed", seed)],
            started,
        ),
    ];
    Ok(ConvergenceStudy {
        boundary,
        volume,
        stability,
        reports,
    })
}
