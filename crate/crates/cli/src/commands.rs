use std::path::Path;

use layerscat::geometry::VolumeMesh;
use layerscat::oracle::ConcentricConfig;
use layerscat::verify::{
    check_completeness, check_energy, check_mixed_reciprocity, check_orthogonality_identity,
    check_reciprocity, convergence_study, CheckReport, InteriorField, VolumeBenchmark,
};
use layerscat::{
    classify_point, CurveShape, IncidentField, IndexField, LayerId, TransmissionSolver,
};
use log::info;

use crate::config::{CheckKind, RunConfig};
use crate::error::CliError;
use crate::output::{
    ensure_dir, number, write_checks, write_densities, write_far_field, write_table, write_text,
};

pub const RESOLVED_CONFIG: &str = "resolved_config.json";
pub const FAR_FIELD_CSV: &str = "farfield.csv";
pub const DENSITIES_CSV: &str = "densities.csv";
pub const CHECKS_CSV: &str = "checks.csv";
pub const CONVERGENCE_CSV: &str = "convergence.csv";

/// Whether every check a command ran passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    ChecksFailed,
}

impl Outcome {
    fn from_reports(reports: &[CheckReport]) -> Self {
        if reports.iter().all(|r| r.pass) {
            Outcome::Passed
        } else {
            Outcome::ChecksFailed
        }
    }
}

fn prepare(cfg: &RunConfig) -> Result<&Path, CliError> {
    let dir = cfg.output_dir.as_path();
    ensure_dir(dir)?;
    write_text(&dir.join(RESOLVED_CONFIG), &cfg.resolved_json())?;
    Ok(dir)
}

fn solver(cfg: &RunConfig) -> Result<TransmissionSolver, CliError> {
    let solver = TransmissionSolver::new(cfg.problem()?)?;
    info!(
        "system of dimension {} factorized, condition estimate {:e}",
        solver.layout().dim(),
        solver.condition_estimate()
    );
    Ok(solver)
}

/// Densities and far field of the configured incident field.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = prepare(cfg)?;
    let sol = solver(cfg)?.solve(&cfg.incident)?;
    write_densities(&dir.join(DENSITIES_CSV), &sol)?;
    write_far_field(
        &dir.join(FAR_FIELD_CSV),
        &sol.far_field(&cfg.far_field_angles()),
    )?;
    Ok(Outcome::Passed)
}

pub fn cmd_farfield(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = prepare(cfg)?;
    let sol = solver(cfg)?.solve(&cfg.incident)?;
    write_far_field(
        &dir.join(FAR_FIELD_CSV),
        &sol.far_field(&cfg.far_field_angles()),
    )?;
    Ok(Outcome::Passed)
}

/// Run the selected checks, in the order listed in the configuration.
pub fn run_checks(cfg: &RunConfig) -> Result<Vec<CheckReport>, CliError> {
    let solver = solver(cfg)?;
    let p = solver.problem();
    let v = &cfg.verify;
    let mut reports = Vec::new();
    for kind in &v.checks {
        match kind {
            CheckKind::MixedReciprocity => {
                let xhat = layerscat::Vec2::from_angle(v.observation_angle);
                for (i, &z) in v.source_points.iter().enumerate() {
                    let layer = classify_point(z, &p.s0, &p.s1)?;
                    if layer == LayerId::Obstacle {
                        return Err(CliError::Schema {
                            path: format!("verify.source_points[{i}]"),
                            message: "sources must lie in the exterior or the layer".into(),
                        });
                    }
                    let mut r = check_mixed_reciprocity(&solver, z, xhat)?;
                    r.name = format!("mixed_reciprocity_{}_{i}", layer_name(layer));
                    reports.push(r);
                }
            }
            CheckKind::Reciprocity => {
                let n = v.directions;
                let angles: Vec<f64> = (0..n)
                    .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)
                    .collect();
                reports.push(check_reciprocity(&solver, &angles)?);
            }
            CheckKind::Energy => {
                let inc = match cfg.incident {
                    inc @ IncidentField::PlaneWave { .. } => inc,
                    IncidentField::PointSource { .. } => IncidentField::plane_wave(0.0),
                };
                let radius = v.energy_radius.unwrap_or_else(|| {
                    2.0 * p
                        .s0
                        .nodes()
                        .iter()
                        .map(|n| n.position.norm())
                        .fold(0.0, f64::max)
                });
                reports.push(check_energy(&solver.solve(&inc)?, radius)?);
            }
            CheckKind::Completeness => {
                let (_, r) = check_completeness(&solver, &v.completeness_counts, cfg.seed)?;
                reports.push(r);
            }
            CheckKind::GreenIdentity => reports.push(green_check(cfg)?),
        }
    }
    Ok(reports)
}

fn layer_name(layer: LayerId) -> &'static str {
    match layer {
        LayerId::Exterior => "exterior",
        LayerId::Layer => "layer",
        LayerId::Obstacle => "obstacle",
    }
}

/// Green identity for the radial Bessel modes of two constant indices,
/// centered at the center of `S₁`.
fn green_check(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let (_, s1) = cfg.curves()?;
    let k2 = cfg.medium.k2;
    let [a, b] = cfg.verify.green_indices;
    let mesh = VolumeMesh::mapped_polar(&s1, cfg.discretization.h, &IndexField::constant(1.0))?;
    let c = s1.center();
    let w = InteriorField::radial_mode(k2 * a.sqrt(), c, &s1, &mesh);
    let wt = InteriorField::radial_mode(k2 * b.sqrt(), c, &s1, &mesh);
    let (n, nt) = (IndexField::constant(a), IndexField::constant(b));
    Ok(check_orthogonality_identity(
        k2, &n, &nt, &s1, &mesh, &w, &wt,
    )?)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = prepare(cfg)?;
    let reports = run_checks(cfg)?;
    for r in &reports {
        info!(
            "{}: {:e} (tolerance {:e}) {}",
            r.name, r.discrepancy, r.tolerance, r.pass
        );
    }
    write_checks(&dir.join(CHECKS_CSV), &reports)?;
    Ok(Outcome::from_reports(&reports))
}

fn concentric(cfg: &RunConfig) -> Result<ConcentricConfig, CliError> {
    let radius = |spec: &crate::config::CurveSpec| match spec.shape {
        CurveShape::Circle { radius } if spec.center == layerscat::Vec2::ZERO => Some(radius),
        _ => None,
    };
    match (radius(&cfg.s0), radius(&cfg.s1), &cfg.index) {
        (Some(r0), Some(r1), IndexField::Constant { .. }) => {
            Ok(ConcentricConfig::new(r0, r1, cfg.medium()))
        }
        _ => Err(CliError::Schema {
            path: "s0".into(),
            message: "convergence needs circles centered at the origin and a constant index".into(),
        }),
    }
}

/// Boundary refinement against the series, volume refinement against the
/// grid reference on the standard bump, and the stability probe.
pub fn cmd_convergence(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let series = concentric(cfg)?;
    let dir = prepare(cfg)?;
    let c = &cfg.convergence;
    let study = convergence_study(
        &series,
        &c.ns,
        &VolumeBenchmark::standard(),
        &c.hs,
        c.epsilon,
        cfg.seed,
    )?;
    let mut rows: Vec<Vec<String>> = study
        .boundary
        .iter()
        .map(|&(n, e)| vec!["boundary".into(), n.to_string(), number(e)])
        .collect();
    rows.extend(
        study
            .volume
            .iter()
            .map(|&(h, e)| vec!["volume".into(), number(h), number(e)]),
    );
    write_table(
        &dir.join(CONVERGENCE_CSV),
        &["study", "parameter", "error"],
        rows,
    )?;
    write_checks(&dir.join(CHECKS_CSV), &study.reports)?;
    Ok(Outcome::from_reports(&study.reports))
}
