//! Catalog of the built-in emitter paths.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::hello::{hello_trajectory, HelloParams};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Stable scenario identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    #[serde(rename = "letter-C")]
    LetterC,
    #[serde(rename = "digit-3")]
    Digit3,
    #[serde(rename = "digit-8")]
    Digit8,
    #[serde(rename = "cyl-spiral")]
    CylSpiral,
    #[serde(rename = "cone-spiral")]
    ConeSpiral,
    #[serde(rename = "hello")]
    Hello,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::LetterC,
        ScenarioId::Digit3,
        ScenarioId::Digit8,
        ScenarioId::CylSpiral,
        ScenarioId::ConeSpiral,
        ScenarioId::Hello,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::LetterC => "letter-C",
            ScenarioId::Digit3 => "digit-3",
            ScenarioId::Digit8 => "digit-8",
            ScenarioId::CylSpiral => "cyl-spiral",
            ScenarioId::ConeSpiral => "cone-spiral",
            ScenarioId::Hello => "hello",
        }
    }

    /// Length of the motion in seconds.
    pub fn terminal_time(self) -> f64 {
        match self {
            ScenarioId::LetterC | ScenarioId::Digit3 => 10.0,
            ScenarioId::Digit8 | ScenarioId::Hello => 8.0,
            ScenarioId::CylSpiral | ScenarioId::ConeSpiral => 20.0,
        }
    }

    /// Fourier order used when smoothing the reconstruction.
    pub fn default_order(self) -> usize {
        match self {
            ScenarioId::CylSpiral => 1,
            ScenarioId::ConeSpiral => 5,
            _ => 3,
        }
    }

    /// Whether the reconstruction is post-processed per gap-separated segment.
    pub fn default_segmented(self) -> bool {
        matches!(self, ScenarioId::Hello)
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Closed-form paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Analytic {
    LetterC,
    Digit3,
    Digit8,
    CylSpiral,
    ConeSpiral,
}

impl Analytic {
    /// Position and velocity (right-hand at corners, left-hand at the end).
    pub(crate) fn state(self, t: f64) -> (Point3, Point3) {
        match self {
            Analytic::LetterC => {
                let w = 3.0 * PI / 20.0;
                let a = w * t + PI / 4.0;
                (
                    Point3::new(0.0, 3.0 * a.cos(), 3.0 * a.sin()),
                    Point3::new(0.0, -3.0 * w * a.sin(), 3.0 * w * a.cos()),
                )
            }
            Analytic::Digit3 => {
                let a = (t - 5.0) * PI / 5.0;
                let (s, c) = a.sin_cos();
                // d|sin a|/da, right-hand at zeros of sin
                let sign = if s != 0.0 { s.signum() } else { c.signum() };
                (
                    Point3::new(0.0, 5.0 * s.abs() - 2.0, 5.0 - t),
                    Point3::new(0.0, sign * c * PI, -1.0),
                )
            }
            Analytic::Digit8 => {
                let lower = |t: f64| {
                    let a = (t - 2.0) * PI / 2.0;
                    (
                        Point3::new(0.0, -2.0 * a.cos(), 2.0 * a.sin() - 2.0),
                        Point3::new(0.0, PI * a.sin(), PI * a.cos()),
                    )
                };
                let upper = |t: f64| {
                    let a = PI * t / 2.0;
                    (
                        Point3::new(0.0, 2.0 * a.cos(), 2.0 * a.sin() + 2.0),
                        Point3::new(0.0, -PI * a.sin(), PI * a.cos()),
                    )
                };
                // position follows the half-open branch intervals, velocity
                // the branch to the right of each junction
                let pos = if t > 3.0 && t <= 7.0 { upper(t).0 } else { lower(t).0 };
                let vel = if (3.0..7.0).contains(&t) { upper(t).1 } else { lower(t).1 };
                (pos, vel)
            }
            Analytic::CylSpiral => {
                let (s, c) = t.sin_cos();
                (
                    Point3::new(3.0 * c, 3.0 * s, 0.5 * t - 5.0),
                    Point3::new(-3.0 * s, 3.0 * c, 0.5),
                )
            }
            Analytic::ConeSpiral => {
                let (s, c) = t.sin_cos();
                (
                    Point3::new(0.2 * t * c, 0.2 * t * s, 0.5 * t - 5.0),
                    Point3::new(0.2 * c - 0.2 * t * s, 0.2 * s + 0.2 * t * c, 0.5),
                )
            }
        }
    }
}

/// Built-in scenario path with its catalog parameters.
pub fn builtin_trajectory(id: ScenarioId) -> Trajectory {
    let shape = match id {
        ScenarioId::LetterC => Analytic::LetterC,
        ScenarioId::Digit3 => Analytic::Digit3,
        ScenarioId::Digit8 => Analytic::Digit8,
        ScenarioId::CylSpiral => Analytic::CylSpiral,
        ScenarioId::ConeSpiral => Analytic::ConeSpiral,
        ScenarioId::Hello => {
            return hello_trajectory(&HelloParams::default())
                .expect("default HELLO parameters are consistent")
        }
    };
    Trajectory::analytic(id.as_str(), shape, id.terminal_time())
}

impl Trajectory {
    /// Looks up a built-in by its string id.
    pub fn builtin_named(name: &str) -> Result<Trajectory> {
        Ok(builtin_trajectory(name.parse()?))
    }
}
