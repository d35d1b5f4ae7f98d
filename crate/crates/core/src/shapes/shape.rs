use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two flashing discs a realization shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscBranch {
    Origin,
    Shifted,
}

/// Whether a realization is the set itself or only its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetBranch {
    Set,
    Boundary,
}

/// Closed subset of the plane with a closed-form oriented distance function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParametricShape {
    /// `{point}`
    Singleton { point: [f64; 2] },
    /// Closed disc.
    Ball { center: [f64; 2], radius: f64 },
    /// `{x : x1 <= offset}`
    HalfPlane { offset: f64 },
    /// `{x : x2 >= x1 tan(angle)}`, angle in `(-pi/2, pi/2]`.
    UpperHalfPlane { angle: f64 },
    /// Disc of radius `r` centered at the origin or at `a`.
    FlashingDisc { a: [f64; 2], r: f64, branch: DiscBranch },
    /// Vertical strip `{x : lo <= x1 <= hi}`: a 1-D interval embedded in the plane.
    Interval { lo: f64, hi: f64 },
    /// A base shape or its boundary.
    SetOrBoundary { base: Box<ParametricShape>, branch: SetBranch },
}

impl ParametricShape {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Self::Singleton { point } if finite(point) => Ok(()),
            Self::Ball { center, radius } if finite(center) && radius.is_finite() => {
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidShape(format!("ball radius must be positive, got {radius}")))
                }
            }
            Self::HalfPlane { offset } if offset.is_finite() => Ok(()),
            Self::UpperHalfPlane { angle } if angle.is_finite() => {
                use std::f64::consts::FRAC_PI_2;
                if *angle > -FRAC_PI_2 && *angle <= FRAC_PI_2 {
                    Ok(())
                } else {
                    Err(Error::InvalidShape(format!("angle {angle} outside (-pi/2, pi/2]")))
                }
            }
            Self::FlashingDisc { a, r, .. } if finite(a) && r.is_finite() => {
                if *r > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidShape(format!("disc radius must be positive, got {r}")))
                }
            }
            Self::Interval { lo, hi } if lo.is_finite() && hi.is_finite() => {
                if lo < hi {
                    Ok(())
                } else {
                    Err(Error::InvalidShape(format!("interval needs lo < hi, got [{lo}, {hi}]")))
                }
            }
            Self::SetOrBoundary { base, .. } => base.validate(),
            _ => Err(Error::InvalidShape("non-finite parameter".into())),
        }
    }

    /// Oriented distance `b(x)`: negative inside, positive outside, zero on
    /// the boundary.
    pub fn odf(&self, x: [f64; 2]) -> f64 {
        match self {
            Self::Singleton { point } => (x[0] - point[0]).hypot(x[1] - point[1]),
            Self::Ball { center, radius } => (x[0] - center[0]).hypot(x[1] - center[1]) - radius,
            Self::HalfPlane { offset } => x[0] - offset,
            Self::UpperHalfPlane { angle } => {
                let norm = x[0].hypot(x[1]);
                if norm == 0.0 {
                    0.0
                } else {
                    norm * (angle - polar_angle(x)).sin()
                }
            }
            Self::FlashingDisc { a, r, branch } => match branch {
                DiscBranch::Origin => x[0].hypot(x[1]) - r,
                DiscBranch::Shifted => (x[0] - a[0]).hypot(x[1] - a[1]) - r,
            },
            Self::Interval { lo, hi } => (lo - x[0]).max(x[0] - hi),
            Self::SetOrBoundary { base, branch } => match branch {
                SetBranch::Set => base.odf(x),
                SetBranch::Boundary => base.odf(x).abs(),
            },
        }
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.odf(x) <= 0.0
    }
}

/// `omega = atan2(x2, x1)`, the polar angle used by the upper half-plane.
///
/// The full `atan2` range is used rather than an arcsine branch: only then
/// does `|x| sin(theta - omega)` equal the signed distance to the line for
/// points with a negative first coordinate.
pub fn polar_angle(x: [f64; 2]) -> f64 {
    x[1].atan2(x[0])
}

/// Free-standing form of [`ParametricShape::odf`].
pub fn odf_closed_form(shape: &ParametricShape, x: [f64; 2]) -> f64 {
    shape.odf(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn catalogued_values() {
        let ball = ParametricShape::Ball { center: [0.0, 0.0], radius: 1.0 };
        assert_eq!(odf_closed_form(&ball, [2.0, 0.0]), 1.0);
        let hp = ParametricShape::HalfPlane { offset: 0.0 };
        assert_eq!(odf_closed_form(&hp, [-3.0, 7.0]), -3.0);
        let up = ParametricShape::UpperHalfPlane { angle: FRAC_PI_4 };
        assert!(odf_closed_form(&up, [1.0, 1.0]).abs() < 1e-15);
        let s = ParametricShape::Singleton { point: [1.0, 1.0] };
        assert_eq!(s.odf([4.0, 5.0]), 5.0);
    }

    #[test]
    fn upper_half_plane_is_signed_line_distance_everywhere() {
        for &angle in &[-1.2, -0.3, 0.0, 0.4, FRAC_PI_4, 1.5] {
            let up = ParametricShape::UpperHalfPlane { angle };
            for &x in &[[1.0, 2.0], [-1.0, 0.0], [-2.0, -3.0], [0.5, -0.1], [0.0, 1.0]] {
                let expected = x[0] * angle.sin() - x[1] * angle.cos();
                assert!((up.odf(x) - expected).abs() < 1e-12, "angle {angle} x {x:?}");
            }
        }
        assert_eq!(ParametricShape::UpperHalfPlane { angle: 0.3 }.odf([0.0, 0.0]), 0.0);
    }

    #[test]
    fn boundary_branch_is_absolute_value() {
        let strip = ParametricShape::Interval { lo: 0.0, hi: 1.0 };
        let boundary = ParametricShape::SetOrBoundary { base: Box::new(strip.clone()), branch: SetBranch::Boundary };
        assert_eq!(strip.odf([0.25, 3.0]), -0.25);
        assert_eq!(boundary.odf([0.25, 3.0]), 0.25);
        assert_eq!(boundary.odf([-0.5, 0.0]), 0.5);
        assert_eq!(boundary.odf([1.0, 0.0]), 0.0);
    }

    #[test]
    fn validation() {
        assert!(ParametricShape::Ball { center: [0.0, 0.0], radius: 0.0 }.validate().is_err());
        assert!(ParametricShape::UpperHalfPlane { angle: -std::f64::consts::FRAC_PI_2 }.validate().is_err());
        assert!(ParametricShape::Interval { lo: 1.0, hi: 1.0 }.validate().is_err());
        assert!(ParametricShape::Singleton { point: [f64::NAN, 0.0] }.validate().is_err());
        assert!(ParametricShape::FlashingDisc { a: [3.0, 0.0], r: 1.0, branch: DiscBranch::Shifted }
            .validate()
            .is_ok());
    }

    #[test]
    fn json_shape() {
        let s = ParametricShape::FlashingDisc { a: [3.0, 0.0], r: 1.0, branch: DiscBranch::Origin };
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"kind":"flashing_disc","a":[3.0,0.0],"r":1.0,"branch":"origin"}"#);
    }
}
