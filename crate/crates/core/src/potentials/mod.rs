//! Discrete boundary layer operators, their off-curve evaluation, and the
//! volume potential over the obstacle.
//!
//! On-curve operators use the Kussmaul-Martensen splitting
//! `L(t, τ) = L₁(t, τ) ln(4 sin²((t - τ)/2)) + L₂(t, τ)`; the hypersingular
//! operator is reduced to tangential derivatives of the single layer (Maue).
//! Operators coupling distinct curves are plain trapezoid sums.

mod boundary;
mod eval;
pub mod kernels;
pub mod quadrature;
mod volume;

pub use boundary::{assemble_boundary_op, BoundaryOperator, OperatorKind, MIN_CURVE_SEPARATION};
pub use eval::{
    evaluate_layer_gradient, evaluate_layer_potential, layer_potential_matrix, Evaluation,
    LayerKind, SAFE_DISTANCE_FACTOR,
};
pub use volume::{
    assemble_volume_op, contrast, disk_integral, volume_entry, volume_gradient_entry,
    volume_normal_entry, VolumeOperator, VolumeTargets,
};
