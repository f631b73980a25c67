//! Time-harmonic acoustic scattering by a penetrable, inhomogeneous obstacle
//! buried inside a bounded homogeneous layer, in two dimensions.
//!
//! The scattered field is represented by single- and double-layer potentials
//! on both interfaces plus a volume potential over the obstacle. The resulting
//! second-kind system couples four boundary densities with the interior field
//! on a quadrature mesh and is discretized by a Nyström method with
//! logarithmic-singularity splitting on the curves.
//!
//! Module map:
//!
//! * [`specialfn`]: Bessel and Hankel functions.
//! * [`geometry`]: interface curves, layer classification, volume meshes.
//! * [`potentials`]: boundary and volume integral operators.
//! * [`solver`]: the coupled system, field and far-field evaluation.
//! * [`oracle`]: separation-of-variables and Lippmann-Schwinger references.
//! * [`verify`]: numerical certification of reciprocity, energy balance,
//!   completeness and the Green identity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod potentials;
pub mod solver;
pub mod specialfn;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    build_volume_mesh, classify_point, CurveShape, IndexField, LayerId, ParametricCurve, Vec2,
    VolumeMesh,
};
pub use solver::{
    far_field, solve_direct, DensitySolution, FarField, IncidentField, MediumConfig,
    TransmissionSolver,
};

/// Complex scalar used throughout the solver.
pub type C64 = num_complex::Complex64;

/// `γ₀ = e^{iπ/4} / sqrt(8πk)`, the far-field amplitude of the free-space
/// point source `(i/4) H₀(k|x - z|)` located at the origin.
pub fn far_field_constant(k: f64) -> C64 {
    C64::from_polar(
        1.0 / (8.0 * std::f64::consts::PI * k).sqrt(),
        std::f64::consts::FRAC_PI_4,
    )
}
