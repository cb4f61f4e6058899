use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Axis-aligned box given by its centre and edge lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub center: Point3,
    pub size: Point3,
}

impl Cuboid {
    pub fn low(&self) -> Point3 {
        self.center - self.size * 0.5
    }

    pub fn high(&self) -> Point3 {
        self.center + self.size * 0.5
    }

    pub fn contains(&self, p: Point3) -> bool {
        let (lo, hi) = (self.low(), self.high());
        (lo.x1..=hi.x1).contains(&p.x1)
            && (lo.x2..=hi.x2).contains(&p.x2)
            && (lo.x3..=hi.x3).contains(&p.x3)
    }

    pub fn volume(&self) -> f64 {
        self.size.x1 * self.size.x2 * self.size.x3
    }
}

/// Region Ω with interior wave speed `speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inclusion {
    pub region: Cuboid,
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub c0: f64,
    pub inclusion: Option<Inclusion>,
}

impl MediumSpec {
    pub fn homogeneous(c0: f64) -> Result<Self> {
        let m = Self { c0, inclusion: None };
        m.validate()?;
        Ok(m)
    }

    pub fn with_inclusion(c0: f64, center: Point3, size: Point3, speed: f64) -> Result<Self> {
        let m = Self {
            c0,
            inclusion: Some(Inclusion {
                region: Cuboid { center, size },
                speed,
            }),
        };
        m.validate()?;
        Ok(m)
    }

    /// Body in front of the writer: 2×10×10 m box centred at (−2, 0, 0).
    pub fn case_ii(c0: f64, speed: f64) -> Self {
        Self::with_inclusion(c0, Point3::new(-2.0, 0.0, 0.0), Point3::new(2.0, 10.0, 10.0), speed)
            .expect("valid preset")
    }

    /// Body between writer and receivers: the same box centred at (2, 0, 0).
    pub fn case_iii(c0: f64, speed: f64) -> Self {
        Self::with_inclusion(c0, Point3::new(2.0, 0.0, 0.0), Point3::new(2.0, 10.0, 10.0), speed)
            .expect("valid preset")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::invalid(format!("background speed must be positive, got {}", self.c0)));
        }
        if let Some(inc) = &self.inclusion {
            if !(inc.speed > 0.0 && inc.speed.is_finite()) {
                return Err(Error::invalid("inclusion speed must be positive"));
            }
            let s = inc.region.size;
            if !(s.x1 > 0.0 && s.x2 > 0.0 && s.x3 > 0.0) || !s.is_finite() || !inc.region.center.is_finite() {
                return Err(Error::invalid("inclusion must be a bounded box with positive edges"));
            }
        }
        Ok(())
    }

    pub fn speed_at(&self, p: Point3) -> f64 {
        match &self.inclusion {
            Some(inc) if inc.region.contains(p) => inc.speed,
            _ => self.c0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_disjoint_from_writing_plane() {
        let ii = MediumSpec::case_ii(330.0, 1500.0);
        let iii = MediumSpec::case_iii(330.0, 1500.0);
        assert!(!ii.inclusion.unwrap().region.contains(Point3::new(0.0, 1.0, 1.0)));
        assert!(!iii.inclusion.unwrap().region.contains(Point3::new(0.0, 1.0, 1.0)));
        assert_eq!(ii.speed_at(Point3::new(-2.0, 0.0, 0.0)), 1500.0);
        assert_eq!(ii.speed_at(Point3::new(2.0, 0.0, 0.0)), 330.0);
        assert_eq!(ii.inclusion.unwrap().region.volume(), 200.0);
    }

    #[test]
    fn rejects_nonpositive_speeds() {
        assert!(MediumSpec::homogeneous(0.0).is_err());
        assert!(MediumSpec::with_inclusion(330.0, Point3::ORIGIN, Point3::new(1.0, 1.0, 1.0), -3.0).is_err());
        assert!(MediumSpec::with_inclusion(330.0, Point3::ORIGIN, Point3::new(1.0, 0.0, 1.0), 3.0).is_err());
    }
}
