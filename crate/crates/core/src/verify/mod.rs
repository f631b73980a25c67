//! Numerical certification of structural identities of the transmission
//! problem, and convergence and stability studies.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

mod completeness;
mod convergence;
mod energy;
mod green;
mod reciprocity;

pub use completeness::{
    check_completeness, completeness_study, normal_derivative_columns, random_smooth_target,
    CompletenessStudy,
};
pub use convergence::{
    boundary_convergence, check_refinement_order, check_refinement_ratio, convergence_study,
    stability_probe, volume_convergence, ConvergenceStudy, StabilityProbe, VolumeBenchmark,
};
pub use energy::{check_energy, energy_balance, EnergyBalance};
pub use green::{check_orthogonality_identity, green_identity_terms, InteriorField};
pub use reciprocity::{
    check_mixed_reciprocity, check_reciprocity, far_field_table, mixed_reciprocity_pair,
};

/// Fields smaller than this are treated as zero: discrepancies between two
/// such values are reported in absolute rather than relative terms.
pub const NULL_FIELD: f64 = 1e-10;

/// Outcome of one check; `pass` holds exactly when `discrepancy <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub params: Vec<(String, String)>,
    pub runtime: Duration,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        discrepancy: f64,
        tolerance: f64,
        params: Vec<(String, String)>,
        started: Instant,
    ) -> Self {
        CheckReport {
            name: name.into(),
            discrepancy,
            tolerance,
            pass: discrepancy <= tolerance,
            params,
            runtime: started.elapsed(),
        }
    }
}

pub(crate) fn param(key: &str, value: impl std::fmt::Display) -> (String, String) {
    (key.to_string(), value.to_string())
}

/// `diff / scale`, or `diff` itself when `scale` is below [`NULL_FIELD`].
pub(crate) fn normalized(diff: f64, scale: f64) -> f64 {
    if scale > NULL_FIELD {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        let t = Instant::now();
        assert!(CheckReport::new("a", 1e-7, 1e-6, vec![], t).pass);
        assert!(CheckReport::new("a", 1e-6, 1e-6, vec![], t).pass);
        assert!(!CheckReport::new("a", 2e-6, 1e-6, vec![], t).pass);
        assert!(!CheckReport::new("a", f64::NAN, 1e-6, vec![], t).pass);
    }

    #[test]
    fn null_fields_compare_absolutely() {
        assert_eq!(normalized(1e-12, 1e-11), 1e-12);
        assert_eq!(normalized(1e-3, 0.5), 2e-3);
    }
}
