use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{param, CheckReport};
use crate::error::{Error, Result};
use crate::geometry::ParametricCurve;
use crate::solver::{IncidentField, TransmissionSolver};
use crate::C64;

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-13;
const TARGET_DEGREE: i32 = 6;

/// Singular values of the weighted matrix of normal derivatives and the
/// relative least-squares residual of the target.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessStudy {
    pub directions: usize,
    pub singular_values: Vec<f64>,
    pub residual: f64,
}

/// `∂w(·, d)/∂ν` at the nodes of `S₁` for plane waves from each angle.
pub fn normal_derivative_columns(
    solver: &TransmissionSolver,
    angles: &[f64],
) -> Result<Vec<Vec<C64>>> {
    angles
        .iter()
        .map(|&t| {
            Ok(solver
                .solve(&IncidentField::plane_wave(t))?
                .obstacle_traces()?
                .1)
        })
        .collect()
}

/// Trigonometric polynomial of degree 6 in the curve parameter with
/// coefficients drawn uniformly from the unit square.
pub fn random_smooth_target(s1: &ParametricCurve, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(i32, C64)> = (-TARGET_DEGREE..=TARGET_DEGREE)
        .map(|m| {
            (
                m,
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    s1.nodes()
        .iter()
        .map(|n| {
            coeffs
                .iter()
                .map(|(m, c)| c * C64::from_polar(1.0, *m as f64 * n.t))
                .sum()
        })
        .collect()
}

/// Least-squares fit of `target` by the columns in the `L²(S₁)` inner product.
pub fn completeness_study(
    s1: &ParametricCurve,
    columns: &[Vec<C64>],
    target: &[C64],
) -> Result<CompletenessStudy> {
    let n = s1.len();
    if columns.is_empty() || target.len() != n || columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidInput(
            "columns and target must live on the nodes of S1".into(),
        ));
    }
    let w = s1.parameter_weight();
    let sw: Vec<f64> = s1.nodes().iter().map(|p| (w * p.jacobian).sqrt()).collect();
    let a = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i] * sw[i]);
    let b: Vec<C64> = target.iter().zip(&sw).map(|(t, s)| t * s).collect();
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let cutoff = sv.iter().copied().fold(0.0, f64::max) * RANK_TOLERANCE;
    let mut rem = b.clone();
    for (k, s) in sv.iter().enumerate() {
        if *s <= cutoff {
            continue;
        }
        let uk = u.column(k);
        let c: C64 = uk.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        for (r, x) in rem.iter_mut().zip(uk.iter()) {
            *r -= c * x;
        }
    }
    let norm = |v: &[C64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(CompletenessStudy {
        directions: columns.len(),
        singular_values: sv,
        residual: norm(&rem) / norm(&b),
    })
}

/// Residuals for nested sets of equally spaced directions, each count
/// dividing the largest. Passes when the residual decreases strictly.
pub fn check_completeness(
    solver: &TransmissionSolver,
    counts: &[usize],
    seed: u64,
) -> Result<(Vec<CompletenessStudy>, CheckReport)> {
    let started = Instant::now();
    let most = counts.iter().copied().max().unwrap_or(0);
    if counts.len() < 2 || counts.iter().any(|&j| j < 4 || most % j != 0) {
        return Err(Error::InvalidInput(
            "direction counts must be at least 4 and divide the largest count".into(),
        ));
    }
    let s1 = &solver.problem().s1;
    let angles: Vec<f64> = (0..most)
        .map(|j| 2.0 * PI * j as f64 / most as f64)
        .collect();
    let columns = normal_derivative_columns(solver, &angles)?;
    let target = random_smooth_target(s1, seed);
    let studies = counts
        .iter()
        .map(|&j| {
            let subset: Vec<Vec<C64>> = columns.iter().step_by(most / j).cloned().collect();
            completeness_study(s1, &subset, &target)
        })
        .collect::<Result<Vec<_>>>()?;
    // largest ratio of consecutive residuals; strict decrease means below 1
    let worst = studies
        .windows(2)
        .map(|w| w[1].residual / w[0].residual)
        .fold(0.0, f64::max);
    let residuals: Vec<String> = studies
        .iter()
        .map(|s| format!("{:e}", s.residual))
        .collect();
    let report = CheckReport::new(
        "completeness",
        worst,
        1.0 - f64::EPSILON,
        vec![
            param("counts", format!("{counts:?}")),
            param("residuals", residuals.join(" ")),
            param("seed", seed),
        ],
        started,
    );
    Ok((studies, report))
}
