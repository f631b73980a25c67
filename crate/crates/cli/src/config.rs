use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use layerscat::geometry::VolumeMesh;
use layerscat::solver::Problem;
use layerscat::{
    build_volume_mesh, CurveShape, IncidentField, IndexField, MediumConfig, ParametricCurve, Vec2,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Wavenumbers and transmission constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub lambda0: f64,
    pub lambda1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub shape: CurveShape,
    #[serde(default)]
    pub center: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    #[serde(default = "default_nodes")]
    pub n0: usize,
    #[serde(default = "default_nodes")]
    pub n1: usize,
    #[serde(default = "default_h")]
    pub h: f64,
    /// Number of equally spaced far-field angles, starting at 0.
    #[serde(default = "default_samples")]
    pub far_field_samples: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            n0: default_nodes(),
            n1: default_nodes(),
            h: default_h(),
            far_field_samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    MixedReciprocity,
    Reciprocity,
    Energy,
    Completeness,
    GreenIdentity,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::MixedReciprocity,
        CheckKind::Reciprocity,
        CheckKind::Energy,
        CheckKind::Completeness,
        CheckKind::GreenIdentity,
    ];
}

/// Parameters of the `verify` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "all_checks")]
    pub checks: Vec<CheckKind>,
    /// Source points for mixed reciprocity, each in the exterior or the layer.
    #[serde(default = "default_sources")]
    pub source_points: Vec<Vec2>,
    #[serde(default = "default_observation")]
    pub observation_angle: f64,
    #[serde(default = "default_directions")]
    pub directions: usize,
    /// Radius of the flux circle; defaults to twice the extent of `S₀`.
    #[serde(default)]
    pub energy_radius: Option<f64>,
    #[serde(default = "default_counts")]
    pub completeness_counts: Vec<usize>,
    /// Constant indices of the two Bessel modes in the Green identity check.
    #[serde(default = "default_green")]
    pub green_indices: [f64; 2],
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            checks: all_checks(),
            source_points: default_sources(),
            observation_angle: default_observation(),
            directions: default_directions(),
            energy_radius: None,
            completeness_counts: default_counts(),
            green_indices: default_green(),
        }
    }
}

/// Parameters of the `convergence` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    #[serde(default = "default_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "default_hs")]
    pub hs: Vec<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl Default for ConvergenceSpec {
    fn default() -> Self {
        ConvergenceSpec {
            ns: default_ns(),
            hs: default_hs(),
            epsilon: default_epsilon(),
        }
    }
}

/// Everything a run needs; every omitted field takes its documented default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub medium: MediumSpec,
    pub s0: CurveSpec,
    pub s1: CurveSpec,
    #[serde(default = "trivial_index")]
    pub index: IndexField,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default = "default_incident")]
    pub incident: IncidentField,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub convergence: ConvergenceSpec,
    #[serde(default)]
    pub seed: u64,
}

fn default_nodes() -> usize {
    128
}
fn default_h() -> f64 {
    0.04
}
fn default_samples() -> usize {
    360
}
fn all_checks() -> Vec<CheckKind> {
    CheckKind::ALL.to_vec()
}
fn default_sources() -> Vec<Vec2> {
    vec![Vec2::new(2.5, 0.0), Vec2::new(1.0, 0.2)]
}
fn default_observation() -> f64 {
    FRAC_PI_2
}
fn default_directions() -> usize {
    8
}
fn default_counts() -> Vec<usize> {
    vec![4, 8, 16, 32]
}
fn default_green() -> [f64; 2] {
    [2.0, 3.0]
}
fn default_ns() -> Vec<usize> {
    vec![32, 64, 128, 256]
}
fn default_hs() -> Vec<f64> {
    vec![0.08, 0.04, 0.02]
}
fn default_epsilon() -> f64 {
    1e-6
}
fn trivial_index() -> IndexField {
    IndexField::constant(1.0)
}
fn default_incident() -> IncidentField {
    IncidentField::PlaneWave {
        direction: Vec2::new(1.0, 0.0),
    }
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn schema(path: &str, message: impl Into<String>) -> CliError {
    CliError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(schema(path, format!("must be positive, got {v}")))
    }
}

/// Parse strict JSON, reporting the path of the offending field.
pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.medium;
        positive("medium.k0", m.k0)?;
        positive("medium.k1", m.k1)?;
        positive("medium.k2", m.k2)?;
        positive("medium.lambda0", m.lambda0)?;
        positive("medium.lambda1", m.lambda1)?;
        let d = &self.discretization;
        for (path, n) in [("discretization.n0", d.n0), ("discretization.n1", d.n1)] {
            if n < 8 || n % 2 != 0 {
                return Err(schema(
                    path,
                    format!("must be an even count of at least 8, got {n}"),
                ));
            }
        }
        positive("discretization.h", d.h)?;
        if d.far_field_samples == 0 {
            return Err(schema(
                "discretization.far_field_samples",
                "must be at least 1",
            ));
        }
        self.index
            .validate()
            .map_err(|e| schema("index", e.to_string()))?;
        let v = &self.verify;
        if v.directions < 2 {
            return Err(schema(
                "verify.directions",
                "at least two directions are needed",
            ));
        }
        if let Some(r) = v.energy_radius {
            positive("verify.energy_radius", r)?;
        }
        let most = v.completeness_counts.iter().copied().max().unwrap_or(0);
        if v.completeness_counts.len() < 2
            || v.completeness_counts
                .iter()
                .any(|&j| j < 4 || most % j != 0)
        {
            return Err(schema(
                "verify.completeness_counts",
                "need at least two counts, each at least 4 and dividing the largest",
            ));
        }
        positive("verify.green_indices[0]", v.green_indices[0])?;
        positive("verify.green_indices[1]", v.green_indices[1])?;
        let c = &self.convergence;
        if c.ns.iter().any(|&n| n < 8 || n % 2 != 0) {
            return Err(schema(
                "convergence.ns",
                "node counts must be even and at least 8",
            ));
        }
        for (i, h) in c.hs.iter().enumerate() {
            positive(&format!("convergence.hs[{i}]"), *h)?;
        }
        positive("convergence.epsilon", c.epsilon)?;
        Ok(())
    }

    pub fn medium(&self) -> MediumConfig {
        let m = &self.medium;
        MediumConfig::new([m.k0, m.k1, m.k2], m.lambda0, m.lambda1).with_index(self.index.clone())
    }

    pub fn curves(&self) -> Result<(ParametricCurve, ParametricCurve), CliError> {
        let d = &self.discretization;
        let s0 = ParametricCurve::new(self.s0.shape.clone(), self.s0.center, d.n0)
            .map_err(|e| schema("s0", e.to_string()))?;
        let s1 = ParametricCurve::new(self.s1.shape.clone(), self.s1.center, d.n1)
            .map_err(|e| schema("s1", e.to_string()))?;
        Ok((s0, s1))
    }

    /// Cartesian mesh of spacing `h`, or `None` when `n ≡ 1`.
    pub fn mesh(&self, s1: &ParametricCurve) -> Result<Option<VolumeMesh>, CliError> {
        if self.index.is_trivial() {
            return Ok(None);
        }
        Ok(Some(build_volume_mesh(
            s1,
            self.discretization.h,
            &self.index,
        )?))
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let (s0, s1) = self.curves()?;
        let mesh = self.mesh(&s1)?;
        Ok(Problem::new(self.medium(), s0, s1, mesh)?)
    }

    pub fn far_field_angles(&self) -> Vec<f64> {
        let n = self.discretization.far_field_samples;
        (0..n)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64)
            .collect()
    }

    /// Pretty JSON with every default filled in.
    pub fn resolved_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "medium": {"k0": 1.0, "k1": 1.5, "k2": 2.5, "lambda0": 0.8, "lambda1": 1.3},
        "s0": {"shape": {"kind": "circle", "radius": 1.5}},
        "s1": {"shape": {"kind": "circle", "radius": 0.7}}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.discretization.n0, 128);
        assert_eq!(cfg.discretization.n1, 128);
        assert_eq!(cfg.discretization.h, 0.04);
        assert_eq!(cfg.seed, 0);
        assert!(cfg.index.is_trivial());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        let again = parse_config_str(&cfg.resolved_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn negative_lambda_names_the_field() {
        let text = MINIMAL.replace("\"lambda0\": 0.8", "\"lambda0\": -1");
        match parse_config_str(&text) {
            Err(CliError::Schema { path, .. }) => assert!(path.contains("lambda0"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("\"k0\": 1.0", "\"k0\": 1.0, \"k3\": 2.0");
        match parse_config_str(&text) {
            Err(CliError::Schema { path, message }) => {
                assert!(path.starts_with("medium"), "{path}");
                assert!(message.contains("k3"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replacen('{', "{\"colour\": 1,", 1);
        assert!(matches!(
            parse_config_str(&text),
            Err(CliError::Schema { .. })
        ));
    }

    #[test]
    fn nested_type_errors_carry_their_path() {
        let text = MINIMAL.replace("\"radius\": 0.7", "\"radius\": \"wide\"");
        match parse_config_str(&text) {
            Err(CliError::Schema { path, .. }) => assert!(path.starts_with("s1.shape"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn index_variants_parse() {
        let text = MINIMAL.replacen(
            '{',
            r#"{"index": {"kind": "radial_bump", "center": [0, 0], "radius": 0.5, "amplitude": [0.4, 0.0]},"#,
            1,
        );
        let cfg = parse_config_str(&text).unwrap();
        assert!(!cfg.index.is_trivial());
    }
}
