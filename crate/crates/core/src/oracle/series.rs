use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::geometry::{IndexField, LayerId, Vec2};
use crate::solver::{FarField, IncidentField, MediumConfig};
use crate::specialfn::{bessel_j_upto, bessel_y_upto};
use crate::C64;

/// Mode systems with a larger condition number are rejected as resonant.
const MAX_SOURCE_ORDER: u32 = 120;

pub const MODE_CONDITION_LIMIT: f64 = 1e13;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Concentric circles centered at the origin with a constant real index.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentricConfig {
    pub r0: f64,
    pub r1: f64,
    pub medium: MediumConfig,
    /// Modes `-m_max..=m_max` are summed.
    pub m_max: u32,
}

impl ConcentricConfig {
    pub fn new(r0: f64, r1: f64, medium: MediumConfig) -> Self {
        ConcentricConfig {
            r0,
            r1,
            medium,
            m_max: 40,
        }
    }

    fn interior_wavenumber(&self) -> Result<f64> {
        match self.medium.index {
            IndexField::Constant { value } if value.im == 0.0 && value.re > 0.0 => {
                Ok(self.medium.k2 * value.re.sqrt())
            }
            _ => Err(Error::InvalidInput(
                "the series oracle needs a constant, real, positive index".into(),
            )),
        }
    }

    fn validate(&self) -> Result<()> {
        self.medium.validate()?;
        if !(self.r0 > self.r1 && self.r1 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "radii must satisfy r0 > r1 > 0, got {} and {}",
                self.r0, self.r1
            )));
        }
        self.interior_wavenumber().map(|_| ())
    }
}

/// `(J_m, J_m′, Y_m, Y_m′)` at `x` for signed orders `|m| ≤ max`, indexed by `m + max`.
struct Cylinder {
    max: i64,
    j: Vec<f64>,
    y: Vec<f64>,
}

impl Cylinder {
    fn new(max: u32, x: f64) -> Result<Self> {
        Ok(Cylinder {
            max: max as i64,
            j: bessel_j_upto(max + 1, x),
            y: bessel_y_upto(max + 1, x)?,
        })
    }

    fn signed(v: &[f64], m: i64) -> f64 {
        let s = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
        s * v[m.unsigned_abs() as usize]
    }

    fn jy(&self, m: i64) -> (f64, f64, f64, f64) {
        assert!(m.abs() <= self.max);
        let j = |n| Self::signed(&self.j, n);
        let y = |n| Self::signed(&self.y, n);
        (
            j(m),
            0.5 * (j(m - 1) - j(m + 1)),
            y(m),
            0.5 * (y(m - 1) - y(m + 1)),
        )
    }

    fn h(&self, m: i64) -> (C64, C64) {
        let (j, jp, y, yp) = self.jy(m);
        (C64::new(j, y), C64::new(jp, yp))
    }
}

/// Coefficients of one angular mode: `a H_m(k₀r)` outside, `b J_m(k₁r) + c Y_m(k₁r)`
/// in the layer, `d J_m(κr)` inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub m: i64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

/// Separation-of-variables solution for concentric circles.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub config: ConcentricConfig,
    pub incident: IncidentField,
    pub modes: Vec<ModeCoefficients>,
    kappa: f64,
}

/// Order needed for the addition-theorem expansion of a point source to
/// converge to double precision on both interfaces.
fn source_order(cfg: &ConcentricConfig, layer: LayerId, zr: f64) -> u32 {
    let ratio = match layer {
        LayerId::Exterior if zr.is_finite() => cfg.r0 / zr,
        LayerId::Layer => (zr / cfg.r0).max(cfg.r1 / zr),
        _ => return 0,
    };
    let n = (37.0 / -ratio.ln()).ceil() + 10.0;
    n.min(MAX_SOURCE_ORDER as f64) as u32
}

/// Solve the transmission problem mode by mode.
///
/// For point sources the mode count is raised above `m_max` when the source
/// lies close to an interface.
pub fn series_solution(cfg: &ConcentricConfig, inc: &IncidentField) -> Result<SeriesSolution> {
    cfg.validate()?;
    let md = &cfg.medium;
    let kappa = cfg.interior_wavenumber()?;

    // incident coefficients of the regular (J) and outgoing (H) expansions
    let (src_layer, zr, zt) = match *inc {
        IncidentField::PlaneWave { direction } => {
            if (direction.norm() - 1.0).abs() > 1e-14 {
                return Err(Error::InvalidInput(
                    "plane-wave direction must be a unit vector".into(),
                ));
            }
            (LayerId::Exterior, f64::INFINITY, direction.angle())
        }
        IncidentField::PointSource { location, layer } => {
            let r = location.norm();
            let expected = if r > cfg.r0 {
                LayerId::Exterior
            } else if r > cfg.r1 {
                LayerId::Layer
            } else {
                LayerId::Obstacle
            };
            if expected != layer || layer == LayerId::Obstacle {
                return Err(Error::InvalidInput(format!(
                    "point source at radius {r} does not lie in {layer:?}"
                )));
            }
            (layer, r, location.angle())
        }
    };
    let mm = cfg.m_max.max(source_order(cfg, src_layer, zr));
    let ext0 = Cylinder::new(mm, md.k0 * cfg.r0)?;
    let lay0 = Cylinder::new(mm, md.k1 * cfg.r0)?;
    let lay1 = Cylinder::new(mm, md.k1 * cfg.r1)?;
    let int1 = Cylinder::new(mm, kappa * cfg.r1)?;
    let src_at = match src_layer {
        LayerId::Layer => Some((Cylinder::new(mm, md.k1 * zr)?, ())),
        LayerId::Exterior if zr.is_finite() => Some((Cylinder::new(mm, md.k0 * zr)?, ())),
        _ => None,
    };

    let (k0, k1, l0, l1) = (md.k0, md.k1, md.lambda0, md.lambda1);
    let mut modes = Vec::with_capacity(2 * mm as usize + 1);
    for m in -(mm as i64)..=(mm as i64) {
        let (h0, h0p) = ext0.h(m);
        let (j10, j10p, y10, y10p) = lay0.jy(m);
        let (j11, j11p, y11, y11p) = lay1.jy(m);
        let (ji, jip, _, _) = int1.jy(m);
        let (hl0, _) = lay0.h(m);
        let (hl1, _) = lay1.h(m);
        let (hi1, _) = int1.h(m);
        // scaled bases keep every column of order one
        let sa = 1.0 / h0.norm();
        let sb = hl0.norm();
        let sc = 1.0 / hl1.norm();
        let sd = hi1.norm();
        let cols = Matrix4::new(
            h0 * sa,
            C64::new(-j10 * sb, 0.0),
            C64::new(-y10 * sc, 0.0),
            C64::new(0.0, 0.0),
            k0 * h0p * sa,
            C64::new(-l0 * k1 * j10p * sb, 0.0),
            C64::new(-l0 * k1 * y10p * sc, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(j11 * sb, 0.0),
            C64::new(y11 * sc, 0.0),
            C64::new(-ji * sd, 0.0),
            C64::new(0.0, 0.0),
            C64::new(k1 * j11p * sb, 0.0),
            C64::new(k1 * y11p * sc, 0.0),
            C64::new(-l1 * kappa * jip * sd, 0.0),
        );
        let phase = C64::from_polar(1.0, -(m as f64) * zt);
        let rhs = match (src_layer, &src_at) {
            (LayerId::Exterior, None) => {
                let alpha = I.powi(m.rem_euclid(4) as i32) * phase;
                let (j00, j00p, _, _) = ext0.jy(m);
                Vector4::new(
                    -alpha * j00,
                    -alpha * k0 * j00p,
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 0.0),
                )
            }
            (LayerId::Exterior, Some((zc, ()))) => {
                let (hz, _) = zc.h(m);
                let alpha = 0.25 * I * hz * phase;
                let (j00, j00p, _, _) = ext0.jy(m);
                Vector4::new(
                    -alpha * j00,
                    -alpha * k0 * j00p,
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 0.0),
                )
            }
            (_, Some((zc, ()))) => {
                // Φ₁ = Σ β H_m(k₁r) e^{imθ} on r₀, Σ α J_m(k₁r) e^{imθ} on r₁
                let (jz, _, _, _) = zc.jy(m);
                let (hz, _) = zc.h(m);
                let beta = 0.25 * I * jz * phase;
                let alpha = 0.25 * I * hz * phase;
                let (hl0, hl0p) = lay0.h(m);
                Vector4::new(
                    beta * hl0,
                    l0 * beta * k1 * hl0p,
                    -alpha * j11,
                    -alpha * k1 * j11p,
                )
            }
            _ => unreachable!("validated above"),
        };
        let sv = cols.singular_values();
        let condition = sv.max() / sv.min();
        if !(condition <= MODE_CONDITION_LIMIT) {
            return Err(Error::ModeSystemSingular {
                order: m,
                condition,
            });
        }
        let x = cols.lu().solve(&rhs).ok_or(Error::ModeSystemSingular {
            order: m,
            condition,
        })?;
        modes.push(ModeCoefficients {
            m,
            a: x[0] * sa,
            b: x[1] * sb,
            c: x[2] * sc,
            d: x[3] * sd,
        });
    }
    Ok(SeriesSolution {
        config: ConcentricConfig {
            m_max: mm,
            ..cfg.clone()
        },
        incident: *inc,
        modes,
        kappa,
    })
}

impl SeriesSolution {
    /// Far-field coefficient of mode `m`: `sqrt(2/(πk₀)) e^{-iπ/4} (-i)^m a_m`.
    fn far_coefficient(&self, mode: &ModeCoefficients) -> C64 {
        let k0 = self.config.medium.k0;
        let mi = (-I).powi(mode.m.rem_euclid(4) as i32);
        (2.0 / (PI * k0)).sqrt() * C64::from_polar(1.0, -PI / 4.0) * mi * mode.a
    }

    pub fn far_field(&self, angles: &[f64]) -> FarField {
        let coeffs: Vec<(i64, C64)> = self
            .modes
            .iter()
            .map(|m| (m.m, self.far_coefficient(m)))
            .collect();
        let values = angles
            .iter()
            .map(|&t| {
                coeffs
                    .iter()
                    .map(|(m, c)| c * C64::from_polar(1.0, *m as f64 * t))
                    .sum()
            })
            .collect();
        FarField {
            angles: angles.to_vec(),
            values,
        }
    }

    /// Magnitude of the outermost far-field coefficients, a bound on the
    /// truncation error for decaying series.
    pub fn tail(&self) -> f64 {
        let first = self
            .modes
            .first()
            .map_or(0.0, |m| self.far_coefficient(m).norm());
        let last = self
            .modes
            .last()
            .map_or(0.0, |m| self.far_coefficient(m).norm());
        first.max(last)
    }

    /// `(value, radial derivative)` of the scattered field in the exterior,
    /// `v` in the layer, `w` in the obstacle (no incident field added).
    pub fn field(&self, x: Vec2) -> Result<(C64, C64)> {
        let cfg = &self.config;
        let md = &cfg.medium;
        let r = x.norm();
        let t = x.angle();
        let mm = cfg.m_max;
        let mut val = C64::new(0.0, 0.0);
        let mut der = C64::new(0.0, 0.0);
        if r > cfg.r0 {
            let c = Cylinder::new(mm, md.k0 * r)?;
            for mode in &self.modes {
                let e = C64::from_polar(1.0, mode.m as f64 * t);
                let (h, hp) = c.h(mode.m);
                val += mode.a * h * e;
                der += mode.a * md.k0 * hp * e;
            }
        } else if r > cfg.r1 {
            let c = Cylinder::new(mm, md.k1 * r)?;
            for mode in &self.modes {
                let e = C64::from_polar(1.0, mode.m as f64 * t);
                let (j, jp, y, yp) = c.jy(mode.m);
                val += (mode.b * j + mode.c * y) * e;
                der += (mode.b * jp + mode.c * yp) * md.k1 * e;
            }
        } else {
            let c = Cylinder::new(mm, self.kappa * r)?;
            for mode in &self.modes {
                let e = C64::from_polar(1.0, mode.m as f64 * t);
                let (j, jp, _, _) = c.jy(mode.m);
                val += mode.d * j * e;
                der += mode.d * self.kappa * jp * e;
            }
        }
        Ok((val, der))
    }
}

/// Far field of the concentric configuration.
pub fn series_far_field(
    cfg: &ConcentricConfig,
    inc: &IncidentField,
    angles: &[f64],
) -> Result<FarField> {
    Ok(series_solution(cfg, inc)?.far_field(angles))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn benchmark() -> ConcentricConfig {
        ConcentricConfig::new(1.5, 0.7, MediumConfig::new([1.0, 1.5, 2.5], 0.8, 1.3))
    }

    #[test]
    fn transmission_conditions_hold_pointwise() {
        for inc in [
            IncidentField::plane_wave(0.3),
            IncidentField::PointSource {
                location: Vec2::new(2.5, 0.4),
                layer: LayerId::Exterior,
            },
            IncidentField::PointSource {
                location: Vec2::new(1.0, 0.2),
                layer: LayerId::Layer,
            },
        ] {
            let cfg = benchmark();
            let md = cfg.medium.clone();
            let sol = series_solution(&cfg, &inc).unwrap();
            let eps = 1e-13;
            let mut worst: f64 = 0.0;
            for i in 0..100 {
                let t = 2.0 * PI * i as f64 / 100.0;
                let e = Vec2::from_angle(t);
                let inc_val = |x: Vec2| inc.value(&md, x);
                let inc_dr = |x: Vec2| {
                    let g = inc.gradient(&md, x);
                    g[0] * e.x + g[1] * e.y
                };
                let (src0, src1) = match inc.layer() {
                    LayerId::Exterior => ((1.0, 0.0), 0.0),
                    _ => ((0.0, 1.0), 1.0),
                };
                let xo = e * (1.5 + eps);
                let xi = e * (1.5 - eps);
                let (u, du) = sol.field(xo).unwrap();
                let (v, dv) = sol.field(xi).unwrap();
                let e1 = (u + src0.0 * inc_val(xo)) - (v + src0.1 * inc_val(xi));
                let e2 = (du + src0.0 * inc_dr(xo)) - md.lambda0 * (dv + src0.1 * inc_dr(xi));
                let xo = e * (0.7 + eps);
                let xi = e * (0.7 - eps);
                let (v, dv) = sol.field(xo).unwrap();
                let (w, dw) = sol.field(xi).unwrap();
                let e3 = v + src1 * inc_val(xo) - w;
                let e4 = dv + src1 * inc_dr(xo) - md.lambda1 * dw;
                worst = worst
                    .max(e1.norm())
                    .max(e2.norm())
                    .max(e3.norm())
                    .max(e4.norm());
            }
            assert!(worst < 1e-11, "{inc:?}: {worst:e}");
        }
    }

    #[test]
    fn transparent_configuration_does_not_scatter() {
        let cfg = ConcentricConfig::new(1.5, 0.7, MediumConfig::new([1.3, 1.3, 1.3], 1.0, 1.0));
        let ff = series_far_field(&cfg, &IncidentField::plane_wave(0.0), &[0.0, 1.0, 2.0]).unwrap();
        assert!(ff.max_abs() < 1e-14, "{}", ff.max_abs());
    }

    #[test]
    fn truncation_is_converged() {
        let mut cfg = benchmark();
        let inc = IncidentField::plane_wave(0.0);
        let a = series_far_field(&cfg, &inc, &[PI]).unwrap().values[0];
        cfg.m_max = 60;
        let b = series_far_field(&cfg, &inc, &[PI]).unwrap().values[0];
        assert!((a - b).norm() < 1e-13 * a.norm());
        cfg.m_max = 40;
        assert!(series_solution(&cfg, &inc).unwrap().tail() < 1e-13 * a.norm());
    }

    #[test]
    fn rotation_covariance() {
        let cfg = benchmark();
        let rot = 0.9;
        let angles: Vec<f64> = (0..12).map(|i| i as f64 * 0.5).collect();
        let shifted: Vec<f64> = angles.iter().map(|a| a + rot).collect();
        let a = series_far_field(&cfg, &IncidentField::plane_wave(0.2), &angles).unwrap();
        let b = series_far_field(&cfg, &IncidentField::plane_wave(0.2 + rot), &shifted).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn complex_index_is_rejected() {
        let mut cfg = benchmark();
        cfg.medium.index = IndexField::Constant {
            value: C64::new(1.5, 0.1),
        };
        assert!(series_solution(&cfg, &IncidentField::plane_wave(0.0)).is_err());
    }
}
