use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};

/// Refractive index `n` on the obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IndexField {
    Constant {
        value: Complex64,
    },
    /// `1 + amplitude * exp(1 - 1/(1 - (r/radius)^2))` for `r < radius`, else 1.
    ///
    /// Smooth, compactly supported, equal to `1 + amplitude` at the center.
    RadialBump {
        center: Vec2,
        radius: f64,
        amplitude: Complex64,
    },
    /// Bilinear interpolation of values on a regular grid, row-major in `y`;
    /// outside the grid the index is 1.
    Tabulated {
        origin: Vec2,
        spacing: [f64; 2],
        shape: [usize; 2],
        values: Vec<Complex64>,
    },
}

impl IndexField {
    pub fn constant(value: f64) -> Self {
        IndexField::Constant {
            value: Complex64::new(value, 0.0),
        }
    }

    pub fn eval(&self, p: Vec2) -> Complex64 {
        match self {
            IndexField::Constant { value } => *value,
            IndexField::RadialBump {
                center,
                radius,
                amplitude,
            } => {
                let s = (p - *center).norm() / radius;
                if s >= 1.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    1.0 + amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            IndexField::Tabulated {
                origin,
                spacing,
                shape,
                values,
            } => {
                let u = (p.x - origin.x) / spacing[0];
                let v = (p.y - origin.y) / spacing[1];
                let [nx, ny] = *shape;
                if u < 0.0 || v < 0.0 || u > (nx - 1) as f64 || v > (ny - 1) as f64 {
                    return Complex64::new(1.0, 0.0);
                }
                let i = (u.floor() as usize).min(nx - 2);
                let j = (v.floor() as usize).min(ny - 2);
                let fu = u - i as f64;
                let fv = v - j as f64;
                let at = |a: usize, b: usize| values[b * nx + a];
                at(i, j) * ((1.0 - fu) * (1.0 - fv))
                    + at(i + 1, j) * (fu * (1.0 - fv))
                    + at(i, j + 1) * ((1.0 - fu) * fv)
                    + at(i + 1, j + 1) * (fu * fv)
            }
        }
    }

    /// `n ≡ 1`, so the volume potential vanishes.
    pub fn is_trivial(&self) -> bool {
        match self {
            IndexField::Constant { value } => *value == Complex64::new(1.0, 0.0),
            IndexField::RadialBump { amplitude, .. } => *amplitude == Complex64::new(0.0, 0.0),
            IndexField::Tabulated { values, .. } => {
                values.iter().all(|v| *v == Complex64::new(1.0, 0.0))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IndexField::RadialBump { radius, .. } if !(*radius > 0.0) => Err(Error::InvalidInput(
                format!("bump radius must be positive, got {radius}"),
            )),
            IndexField::Tabulated {
                spacing,
                shape,
                values,
                ..
            } => {
                if shape[0] < 2 || shape[1] < 2 || values.len() != shape[0] * shape[1] {
                    return Err(Error::InvalidInput(
                        "tabulated index needs a grid of at least 2x2 matching its values".into(),
                    ));
                }
                if !(spacing[0] > 0.0 && spacing[1] > 0.0) {
                    return Err(Error::InvalidInput(
                        "tabulated spacing must be positive".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_profile() {
        let f = IndexField::RadialBump {
            center: Vec2::ZERO,
            radius: 0.5,
            amplitude: Complex64::new(0.4, 0.0),
        };
        assert!((f.eval(Vec2::ZERO) - Complex64::new(1.4, 0.0)).norm() < 1e-15);
        assert_eq!(f.eval(Vec2::new(0.5, 0.0)), Complex64::new(1.0, 0.0));
        assert_eq!(f.eval(Vec2::new(0.0, 0.9)), Complex64::new(1.0, 0.0));
        let near_edge = f.eval(Vec2::new(0.499, 0.0)) - 1.0;
        assert!(near_edge.norm() < 1e-50);
    }

    #[test]
    fn tabulated_interpolates_bilinearly() {
        let f = IndexField::Tabulated {
            origin: Vec2::new(-1.0, -1.0),
            spacing: [2.0, 2.0],
            shape: [2, 2],
            values: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(4.0, 1.0),
            ],
        };
        f.validate().unwrap();
        let mid = f.eval(Vec2::ZERO);
        assert!((mid - Complex64::new(2.5, 0.25)).norm() < 1e-15);
        assert_eq!(f.eval(Vec2::new(5.0, 0.0)), Complex64::new(1.0, 0.0));
    }
}
