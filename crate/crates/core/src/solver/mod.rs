//! The coupled boundary/volume transmission system: assembly, solution,
//! and evaluation of the near and far fields.

mod field;
mod system;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify_point, IndexField, LayerId, ParametricCurve, Vec2};
use crate::potentials::kernels;
use crate::C64;

pub use field::{far_field, FarField};
pub use system::{
    assemble_system, solve_direct, DensitySolution, Problem, SystemLayout, TransmissionSolver,
    CONDITION_THRESHOLD, RESIDUAL_TOLERANCE,
};

/// Wavenumbers, transmission constants and refractive index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub index: IndexField,
}

impl MediumConfig {
    /// Homogeneous index `n ≡ 1`.
    pub fn new(k: [f64; 3], lambda0: f64, lambda1: f64) -> Self {
        MediumConfig {
            k0: k[0],
            k1: k[1],
            k2: k[2],
            lambda0,
            lambda1,
            index: IndexField::constant(1.0),
        }
    }

    pub fn with_index(mut self, index: IndexField) -> Self {
        self.index = index;
        self
    }

    pub fn wavenumber(&self, layer: LayerId) -> f64 {
        match layer {
            LayerId::Exterior => self.k0,
            LayerId::Layer => self.k1,
            LayerId::Obstacle => self.k2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k0", self.k0),
            ("k1", self.k1),
            ("k2", self.k2),
            ("lambda0", self.lambda0),
            ("lambda1", self.lambda1),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        self.index.validate()
    }
}

/// Incident wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IncidentField {
    /// `e^{i k₀ x·d}`.
    PlaneWave { direction: Vec2 },
    /// `Φ_{k_j}(x, z)` radiating inside layer `j` (exterior or layer only).
    PointSource { location: Vec2, layer: LayerId },
}

impl IncidentField {
    pub fn plane_wave(angle: f64) -> Self {
        IncidentField::PlaneWave {
            direction: Vec2::from_angle(angle),
        }
    }

    /// The medium in which the incident field is defined.
    pub fn layer(&self) -> LayerId {
        match self {
            IncidentField::PlaneWave { .. } => LayerId::Exterior,
            IncidentField::PointSource { layer, .. } => *layer,
        }
    }

    /// Check the invariants against a geometry.
    pub fn validate(&self, s0: &ParametricCurve, s1: &ParametricCurve) -> Result<()> {
        match *self {
            IncidentField::PlaneWave { direction } => {
                if (direction.norm() - 1.0).abs() > 1e-14 {
                    return Err(Error::InvalidInput(format!(
                        "plane-wave direction must be a unit vector, |d| = {}",
                        direction.norm()
                    )));
                }
            }
            IncidentField::PointSource { location, layer } => {
                if layer == LayerId::Obstacle {
                    return Err(Error::InvalidInput(
                        "point sources must lie in the exterior or the layer".into(),
                    ));
                }
                let actual = classify_point(location, s0, s1)?;
                if actual != layer {
                    return Err(Error::InvalidInput(format!(
                        "point source at ({}, {}) lies in {actual:?}, not {layer:?}",
                        location.x, location.y
                    )));
                }
            }
        }
        Ok(())
    }

    /// `u^i(x)`.
    pub fn value(&self, medium: &MediumConfig, x: Vec2) -> C64 {
        match *self {
            IncidentField::PlaneWave { direction } => {
                C64::from_polar(1.0, medium.k0 * x.dot(direction))
            }
            IncidentField::PointSource { location, layer } => {
                kernels::phi(medium.wavenumber(layer), x - location)
            }
        }
    }

    /// `∇u^i(x)`.
    pub fn gradient(&self, medium: &MediumConfig, x: Vec2) -> [C64; 2] {
        match *self {
            IncidentField::PlaneWave { direction } => {
                let e =
                    C64::new(0.0, medium.k0) * C64::from_polar(1.0, medium.k0 * x.dot(direction));
                [e * direction.x, e * direction.y]
            }
            IncidentField::PointSource { location, layer } => {
                kernels::grad_phi(medium.wavenumber(layer), x - location)
            }
        }
    }
}

/// Jump data of the transmission problem: `u - v = f`,
/// `∂u/∂ν - λ₀ ∂v/∂ν = g` on `S₀`, `v - w = p`, `∂v/∂ν - λ₁ ∂w/∂ν = q` on `S₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionData {
    pub f: Vec<C64>,
    pub g: Vec<C64>,
    pub p: Vec<C64>,
    pub q: Vec<C64>,
}

impl TransmissionData {
    pub fn scaled(&self, s: C64) -> TransmissionData {
        let sc = |v: &Vec<C64>| v.iter().map(|x| x * s).collect();
        TransmissionData {
            f: sc(&self.f),
            g: sc(&self.g),
            p: sc(&self.p),
            q: sc(&self.q),
        }
    }
}

/// Nodal jump data induced by an incident field.
///
/// For a source in the exterior the scattered field is `u` there, so
/// `f = -u^i`, `g = -∂u^i/∂ν` and `p = q = 0`. For a source in the layer the
/// total field in the layer is `v + u^i`, giving `f = u^i`,
/// `g = λ₀ ∂u^i/∂ν`, `p = -u^i` and `q = -∂u^i/∂ν`.
pub fn incident_to_data(
    inc: &IncidentField,
    medium: &MediumConfig,
    s0: &ParametricCurve,
    s1: &ParametricCurve,
) -> Result<TransmissionData> {
    inc.validate(s0, s1)?;
    let trace = |c: &ParametricCurve| -> (Vec<C64>, Vec<C64>) {
        c.nodes()
            .iter()
            .map(|n| {
                let g = inc.gradient(medium, n.position);
                (
                    inc.value(medium, n.position),
                    g[0] * n.normal.x + g[1] * n.normal.y,
                )
            })
            .unzip()
    };
    let (u0, du0) = trace(s0);
    let zeros1 = vec![C64::new(0.0, 0.0); s1.len()];
    Ok(match inc.layer() {
        LayerId::Exterior => TransmissionData {
            f: u0.iter().map(|v| -v).collect(),
            g: du0.iter().map(|v| -v).collect(),
            p: zeros1.clone(),
            q: zeros1,
        },
        _ => {
            let (u1, du1) = trace(s1);
            TransmissionData {
                f: u0,
                g: du0.iter().map(|v| v * medium.lambda0).collect(),
                p: u1.iter().map(|v| -v).collect(),
                q: du1.iter().map(|v| -v).collect(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::hankel1;

    fn circles() -> (ParametricCurve, ParametricCurve) {
        (
            ParametricCurve::circle(Vec2::ZERO, 1.5, 64).unwrap(),
            ParametricCurve::circle(Vec2::ZERO, 0.7, 64).unwrap(),
        )
    }

    #[test]
    fn plane_wave_data() {
        let (s0, s1) = circles();
        let m = MediumConfig::new([1.3, 1.5, 2.5], 0.8, 1.3);
        let d = incident_to_data(&IncidentField::plane_wave(0.0), &m, &s0, &s1).unwrap();
        // node 0 of s0 is (1.5, 0)
        assert!((d.f[0] + C64::from_polar(1.0, 1.5 * 1.3)).norm() < 1e-15);
        assert!(d.p.iter().chain(&d.q).all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn layer_point_source_data() {
        let (s0, s1) = circles();
        let m = MediumConfig::new([1.0, 1.5, 2.5], 0.8, 1.3);
        let inc = IncidentField::PointSource {
            location: Vec2::new(1.0, 0.0),
            layer: LayerId::Layer,
        };
        let d = incident_to_data(&inc, &m, &s0, &s1).unwrap();
        let expect = -C64::new(0.0, 0.25) * hankel1(0, 0.3 * 1.5).unwrap();
        assert!((d.p[0] - expect).norm() < 1e-15);
    }

    #[test]
    fn obstacle_point_source_is_rejected() {
        let (s0, s1) = circles();
        let m = MediumConfig::new([1.0, 1.5, 2.5], 0.8, 1.3);
        let inc = IncidentField::PointSource {
            location: Vec2::ZERO,
            layer: LayerId::Obstacle,
        };
        assert!(incident_to_data(&inc, &m, &s0, &s1).is_err());
        let mislabeled = IncidentField::PointSource {
            location: Vec2::new(3.0, 0.0),
            layer: LayerId::Layer,
        };
        assert!(incident_to_data(&mislabeled, &m, &s0, &s1).is_err());
    }

    #[test]
    fn nonpositive_constants_are_rejected() {
        assert!(MediumConfig::new([1.0, 1.0, 1.0], -1.0, 1.0)
            .validate()
            .is_err());
        assert!(MediumConfig::new([1.0, 0.0, 1.0], 1.0, 1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn incident_gradient_matches_difference_quotient() {
        let m = MediumConfig::new([1.3, 1.5, 2.5], 0.8, 1.3);
        let x = Vec2::new(0.4, 1.1);
        let h = 1e-6;
        for inc in [
            IncidentField::plane_wave(0.7),
            IncidentField::PointSource {
                location: Vec2::new(1.0, 0.2),
                layer: LayerId::Layer,
            },
        ] {
            let g = inc.gradient(&m, x);
            let fd = (inc.value(&m, x + Vec2::new(h, 0.0)) - inc.value(&m, x - Vec2::new(h, 0.0)))
                / (2.0 * h);
            assert!((g[0] - fd).norm() < 1e-7);
        }
    }
}
