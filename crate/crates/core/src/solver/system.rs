use std::sync::Arc;

use faer::{Mat, MatMut};

use super::{incident_to_data, IncidentField, MediumConfig, TransmissionData};
use crate::error::{Error, Result};
use crate::geometry::{min_node_distance, ParametricCurve, Vec2, VolumeMesh};
use crate::linalg::{fill_columns, relative_residual, LuFactors};
use crate::potentials::{
    assemble_boundary_op, contrast, layer_potential_matrix, volume_entry, volume_normal_entry,
    LayerKind, OperatorKind,
};
use crate::C64;

/// Systems whose condition estimate exceeds this are rejected.
pub const CONDITION_THRESHOLD: f64 = 1e12;

/// Relative residual every accepted solution satisfies.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Geometry, medium and (optional) volume mesh of one configuration.
#[derive(Debug, Clone)]
pub struct Problem {
    pub medium: MediumConfig,
    pub s0: ParametricCurve,
    pub s1: ParametricCurve,
    /// `None` for the boundary-only system, valid when `n ≡ 1`.
    pub mesh: Option<VolumeMesh>,
}

impl Problem {
    pub fn new(
        medium: MediumConfig,
        s0: ParametricCurve,
        s1: ParametricCurve,
        mesh: Option<VolumeMesh>,
    ) -> Result<Self> {
        medium.validate()?;
        let distance = min_node_distance(&s0, &s1);
        if distance < crate::potentials::MIN_CURVE_SEPARATION {
            return Err(Error::SingularGeometry { distance });
        }
        if s1.nodes().iter().any(|n| !s0.contains(n.position)) {
            return Err(Error::InvalidInput("S1 must lie strictly inside S0".into()));
        }
        let mesh = match mesh {
            Some(m) => Some(m.with_index(&medium.index)?),
            None if medium.index.is_trivial() => None,
            None => {
                return Err(Error::InvalidInput(
                    "a volume mesh is required when the refractive index is not identically 1"
                        .into(),
                ))
            }
        };
        Ok(Problem {
            medium,
            s0,
            s1,
            mesh,
        })
    }

    pub fn layout(&self) -> SystemLayout {
        SystemLayout {
            n0: self.s0.len(),
            n1: self.s1.len(),
            m: self.mesh.as_ref().map_or(0, |m| m.len()),
        }
    }
}

/// Position of each unknown block `(ψ₀, φ₀, ψ₁, φ₁, w)` in the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemLayout {
    pub n0: usize,
    pub n1: usize,
    pub m: usize,
}

impl SystemLayout {
    pub fn dim(&self) -> usize {
        2 * self.n0 + 2 * self.n1 + self.m
    }
    pub fn psi0(&self) -> usize {
        0
    }
    pub fn phi0(&self) -> usize {
        self.n0
    }
    pub fn psi1(&self) -> usize {
        2 * self.n0
    }
    pub fn phi1(&self) -> usize {
        2 * self.n0 + self.n1
    }
    pub fn w(&self) -> usize {
        2 * self.n0 + 2 * self.n1
    }
}

fn put(dst: &mut Mat<C64>, row: usize, col: usize, block: &Mat<C64>, scale: f64) {
    for j in 0..block.ncols() {
        for i in 0..block.nrows() {
            dst[(row + i, col + j)] += block[(i, j)] * scale;
        }
    }
}

fn add_identity(dst: &mut Mat<C64>, start: usize, len: usize) {
    for i in start..start + len {
        dst[(i, i)] += C64::new(1.0, 0.0);
    }
}

/// The discrete system `(I + A) U = R` for the unknowns `(ψ₀, φ₀, ψ₁, φ₁, w)`,
/// with the rows for `ψ₀, φ₀` scaled by `λ = 2/(λ₀+1)` and those for
/// `ψ₁, φ₁` by `μ = 2/(λ₁+1)`.
pub fn assemble_system(problem: &Problem) -> Result<(Mat<C64>, SystemLayout)> {
    let Problem {
        medium: md,
        s0,
        s1,
        mesh,
    } = problem;
    let lay = problem.layout();
    let (l0, l1) = (md.lambda0, md.lambda1);
    let lam = 2.0 / (l0 + 1.0);
    let mu = 2.0 / (l1 + 1.0);
    let on =
        |kind, c: &ParametricCurve, k| assemble_boundary_op(kind, c, None, k).map(|o| o.matrix);
    let across = |kind, src: &ParametricCurve, tgt: &ParametricCurve, k| {
        assemble_boundary_op(kind, src, Some(tgt), k).map(|o| o.matrix)
    };
    use OperatorKind::{AdjointDouble as Kp, Double as K, Hypersingular as T, Single as S};

    let mut a = Mat::<C64>::zeros(lay.dim(), lay.dim());
    let (r0, r1, r2, r3) = (lay.psi0(), lay.phi0(), lay.psi1(), lay.phi1());

    // rows of ψ₀ and φ₀ (collocation on S₀)
    {
        let (k00, k01) = (on(K, s0, md.k0)?, on(K, s0, md.k1)?);
        put(&mut a, r0, r0, &k00, lam * l0);
        put(&mut a, r0, r0, &k01, -lam);
        drop((k00, k01));
        let (s00, s01) = (on(S, s0, md.k0)?, on(S, s0, md.k1)?);
        put(&mut a, r0, r1, &s00, lam);
        put(&mut a, r0, r1, &s01, -lam);
        put(&mut a, r0, r2, &across(K, s1, s0, md.k1)?, -lam * l1);
        put(&mut a, r0, r3, &across(S, s1, s0, md.k1)?, -lam);

        let (t00, t01) = (on(T, s0, md.k0)?, on(T, s0, md.k1)?);
        put(&mut a, r1, r0, &t01, lam * l0);
        put(&mut a, r1, r0, &t00, -lam * l0);
        let (kp00, kp01) = (on(Kp, s0, md.k0)?, on(Kp, s0, md.k1)?);
        put(&mut a, r1, r1, &kp01, lam * l0);
        put(&mut a, r1, r1, &kp00, -lam);
        put(&mut a, r1, r2, &across(T, s1, s0, md.k1)?, lam * l0 * l1);
        put(&mut a, r1, r3, &across(Kp, s1, s0, md.k1)?, lam * l0);
    }
    // rows of ψ₁ and φ₁ (collocation on S₁)
    {
        put(&mut a, r2, r0, &across(K, s0, s1, md.k1)?, mu);
        put(&mut a, r2, r1, &across(S, s0, s1, md.k1)?, mu);
        put(&mut a, r2, r2, &on(K, s1, md.k1)?, mu * l1);
        put(&mut a, r2, r2, &on(K, s1, md.k2)?, -mu);
        put(&mut a, r2, r3, &on(S, s1, md.k1)?, mu);
        put(&mut a, r2, r3, &on(S, s1, md.k2)?, -mu);

        put(&mut a, r3, r0, &across(T, s0, s1, md.k1)?, -mu);
        put(&mut a, r3, r1, &across(Kp, s0, s1, md.k1)?, -mu);
        put(&mut a, r3, r2, &on(T, s1, md.k2)?, mu * l1);
        put(&mut a, r3, r2, &on(T, s1, md.k1)?, -mu * l1);
        put(&mut a, r3, r3, &on(Kp, s1, md.k2)?, mu * l1);
        put(&mut a, r3, r3, &on(Kp, s1, md.k1)?, -mu);
    }
    add_identity(&mut a, 0, lay.w());

    if let Some(mesh) = mesh {
        let rw = lay.w();
        let m = lay.m;
        let points: Vec<Vec2> = s1.nodes().iter().map(|n| n.position).collect();
        let normals: Vec<Vec2> = s1.nodes().iter().map(|n| n.normal).collect();
        let c = contrast(mesh, md.k2);
        let k2 = md.k2;
        // -μ V and μλ₁ V′ acting on w, collocated on S₁
        fill_columns(a.as_mut().submatrix_mut(r2, rw, lay.n1, m), |i, q| {
            -mu * volume_entry(mesh, &c, k2, points[i], q, false)
        });
        fill_columns(a.as_mut().submatrix_mut(r3, rw, lay.n1, m), |i, q| {
            mu * l1 * volume_normal_entry(mesh, &c, k2, points[i], normals[i], q)
        });
        // w - K̃₁₂ψ₁ - S̃₁₂φ₁ - V w = 0 at the mesh nodes
        let kt = layer_potential_matrix(LayerKind::Double, s1, k2, &mesh.nodes);
        put(&mut a, rw, r2, &kt, -1.0);
        drop(kt);
        let st = layer_potential_matrix(LayerKind::Single, s1, k2, &mesh.nodes);
        put(&mut a, rw, r3, &st, -1.0);
        drop(st);
        fill_volume_rows(a.as_mut().submatrix_mut(rw, rw, m, m), mesh, &c, k2);
    }
    Ok((a, lay))
}

fn fill_volume_rows(dst: MatMut<'_, C64>, mesh: &VolumeMesh, c: &[C64], k2: f64) {
    fill_columns(dst, |i, q| {
        let v = volume_entry(mesh, c, k2, mesh.nodes[i], q, i == q);
        if i == q {
            C64::new(1.0, 0.0) - v
        } else {
            -v
        }
    });
}

/// Factorized system, reusable for any number of incident fields.
pub struct TransmissionSolver {
    problem: Arc<Problem>,
    layout: SystemLayout,
    matrix: Mat<C64>,
    lu: LuFactors,
}

impl std::fmt::Debug for TransmissionSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransmissionSolver")
            .field("layout", &self.layout)
            .field("condition_estimate", &self.lu.condition_estimate())
            .finish()
    }
}

impl TransmissionSolver {
    pub fn new(problem: Problem) -> Result<Self> {
        let (matrix, layout) = assemble_system(&problem)?;
        let lu = LuFactors::new(matrix.as_ref());
        let estimate = lu.condition_estimate();
        log::debug!(
            "system of dimension {} assembled, condition estimate {estimate:.3e}",
            layout.dim()
        );
        if !(estimate <= CONDITION_THRESHOLD) {
            return Err(Error::IllConditioned {
                estimate,
                threshold: CONDITION_THRESHOLD,
            });
        }
        Ok(TransmissionSolver {
            problem: Arc::new(problem),
            layout,
            matrix,
            lu,
        })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn layout(&self) -> SystemLayout {
        self.layout
    }

    pub fn condition_estimate(&self) -> f64 {
        self.lu.condition_estimate()
    }

    /// Right-hand side `R` for given jump data.
    pub fn rhs(&self, data: &TransmissionData) -> Vec<C64> {
        let md = &self.problem.medium;
        let lam = 2.0 / (md.lambda0 + 1.0);
        let mu = 2.0 / (md.lambda1 + 1.0);
        let mut r = Vec::with_capacity(self.layout.dim());
        r.extend(data.f.iter().map(|v| v * lam));
        r.extend(data.g.iter().map(|v| -v * lam));
        r.extend(data.p.iter().map(|v| v * mu));
        r.extend(data.q.iter().map(|v| -v * mu));
        r.resize(self.layout.dim(), C64::new(0.0, 0.0));
        r
    }

    pub fn solve(&self, inc: &IncidentField) -> Result<DensitySolution> {
        let p = &self.problem;
        let data = incident_to_data(inc, &p.medium, &p.s0, &p.s1)?;
        self.solve_data(&data, Some(*inc))
    }

    /// Solve for arbitrary jump data; `incident` is only recorded so that
    /// total fields can be formed later.
    pub fn solve_data(
        &self,
        data: &TransmissionData,
        incident: Option<IncidentField>,
    ) -> Result<DensitySolution> {
        let lay = self.layout;
        if data.f.len() != lay.n0
            || data.g.len() != lay.n0
            || data.p.len() != lay.n1
            || data.q.len() != lay.n1
        {
            return Err(Error::InvalidInput(
                "jump data does not match the curve node counts".into(),
            ));
        }
        let rhs = self.rhs(data);
        let x = self.lu.solve(&rhs);
        let residual = relative_residual(self.matrix.as_ref(), &x, &rhs);
        if !(residual <= RESIDUAL_TOLERANCE) {
            log::warn!("relative residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:e}");
        }
        let block = |start: usize, len: usize| x[start..start + len].to_vec();
        Ok(DensitySolution {
            problem: Arc::clone(&self.problem),
            incident,
            psi0: block(lay.psi0(), lay.n0),
            phi0: block(lay.phi0(), lay.n0),
            psi1: block(lay.psi1(), lay.n1),
            phi1: block(lay.phi1(), lay.n1),
            w_grid: block(lay.w(), lay.m),
            condition_estimate: self.lu.condition_estimate(),
            residual,
        })
    }
}

/// Solved densities `(ψ₀, φ₀, ψ₁, φ₁)` and nodal interior field `w`.
#[derive(Debug, Clone)]
pub struct DensitySolution {
    pub problem: Arc<Problem>,
    pub incident: Option<IncidentField>,
    pub psi0: Vec<C64>,
    pub phi0: Vec<C64>,
    pub psi1: Vec<C64>,
    pub phi1: Vec<C64>,
    pub w_grid: Vec<C64>,
    pub condition_estimate: f64,
    pub residual: f64,
}

/// Assemble, factorize and solve in one call.
pub fn solve_direct(
    inc: &IncidentField,
    medium: &MediumConfig,
    s0: &ParametricCurve,
    s1: &ParametricCurve,
    mesh: Option<&VolumeMesh>,
) -> Result<DensitySolution> {
    let problem = Problem::new(medium.clone(), s0.clone(), s1.clone(), mesh.cloned())?;
    TransmissionSolver::new(problem)?.solve(inc)
}
