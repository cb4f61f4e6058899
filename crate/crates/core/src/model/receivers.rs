use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

/// A patch of the sphere of radius `radius` centred at the origin, in
/// spherical coordinates `x = r (sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub radius: f64,
    pub polar: (f64, f64),
    pub azimuth: (f64, f64),
}

impl PatchSpec {
    /// r = 10 m, θ ∈ (π/4, 3π/4), φ ∈ (−π/4, π/4).
    pub fn paper_default() -> Self {
        Self {
            radius: 10.0,
            polar: (PI / 4.0, 3.0 * PI / 4.0),
            azimuth: (-PI / 4.0, PI / 4.0),
        }
    }

    pub fn area(&self) -> f64 {
        let r = self.radius;
        r * r * (self.azimuth.1 - self.azimuth.0) * (self.polar.0.cos() - self.polar.1.cos())
    }

    fn validate(&self) -> Result<()> {
        let (t0, t1) = self.polar;
        let (p0, p1) = self.azimuth;
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("patch radius must be positive"));
        }
        if !(0.0 <= t0 && t0 < t1 && t1 <= PI) {
            return Err(Error::invalid("polar range must satisfy 0 <= min < max <= pi"));
        }
        if !(p0 < p1 && p1 - p0 <= 2.0 * PI) {
            return Err(Error::invalid("azimuthal range must be non-degenerate and at most 2 pi"));
        }
        Ok(())
    }
}

/// Receiver positions on a sphere patch with per-receiver cell areas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverArray {
    pub positions: Vec<Point3>,
    pub weights: Vec<f64>,
    pub patch: Option<PatchSpec>,
}

impl ReceiverArray {
    /// Arbitrary receivers (e.g. the two probes of the media comparison).
    pub fn from_points(positions: Vec<Point3>, weights: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != weights.len() {
            return Err(Error::invalid("receiver positions and weights must be non-empty and aligned"));
        }
        if weights.iter().any(|w| !(*w > 0.0)) || positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("receiver weights must be positive and positions finite"));
        }
        Ok(Self {
            positions,
            weights,
            patch: None,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Lays out `n_receivers` cells on a (θ, φ) product grid over the patch.
///
/// The grid uses `n_φ` columns, with `n_φ` chosen so that the cell shape
/// follows the patch aspect ratio (polar arc against mean azimuthal arc),
/// and `⌈n / n_φ⌉` polar bands. The last band holds the remainder, spread
/// evenly over the full azimuthal range. Receivers sit at cell centres and
/// carry the exact spherical area of their cell, so the weights add up to
/// the patch area.
pub fn make_receiver_array(patch: PatchSpec, n_receivers: usize) -> Result<ReceiverArray> {
    patch.validate()?;
    if n_receivers == 0 {
        return Err(Error::invalid("at least one receiver is required"));
    }
    let (t0, t1) = patch.polar;
    let (p0, p1) = patch.azimuth;
    let d_theta = t1 - t0;
    let d_phi = p1 - p0;
    let mean_sin = (t0.cos() - t1.cos()) / d_theta;
    let aspect = d_theta / (d_phi * mean_sin.max(f64::MIN_POSITIVE));
    let n_phi = ((n_receivers as f64 / aspect).sqrt().round() as usize).clamp(1, n_receivers);
    let n_theta = n_receivers.div_ceil(n_phi);

    let r2 = patch.radius * patch.radius;
    let mut positions = Vec::with_capacity(n_receivers);
    let mut weights = Vec::with_capacity(n_receivers);
    for row in 0..n_theta {
        let in_row = if row + 1 == n_theta {
            n_receivers - row * n_phi
        } else {
            n_phi
        };
        let ta = t0 + d_theta * row as f64 / n_theta as f64;
        let tb = if row + 1 == n_theta {
            t1
        } else {
            t0 + d_theta * (row + 1) as f64 / n_theta as f64
        };
        let tc = 0.5 * (ta + tb);
        let cell_phi = d_phi / in_row as f64;
        let area = r2 * (ta.cos() - tb.cos()) * cell_phi;
        for col in 0..in_row {
            let pc = p0 + cell_phi * (col as f64 + 0.5);
            let (st, ct) = tc.sin_cos();
            let (sp, cp) = pc.sin_cos();
            positions.push(Point3::new(st * cp, st * sp, ct) * patch.radius);
            weights.push(area);
        }
    }
    Ok(ReceiverArray {
        positions,
        weights,
        patch: Some(patch),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_patch_layout() {
        let rcv = make_receiver_array(PatchSpec::paper_default(), 200).unwrap();
        assert_eq!(rcv.len(), 200);
        let floor = 10.0 * (PI / 4.0).sin() * (PI / 4.0).cos();
        assert!(rcv.positions.iter().all(|p| p.x1 >= floor));
        for p in &rcv.positions {
            assert!((p.norm() - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_patch_area() {
        let rcv = make_receiver_array(PatchSpec::paper_default(), 200).unwrap();
        let expected = 100.0 * (PI / 2.0) * 2f64.sqrt();
        assert!((expected - 222.14).abs() < 0.01);
        assert!(((rcv.total_weight() - expected) / expected).abs() < 1e-9);
    }

    #[test]
    fn single_cell_patch() {
        let patch = PatchSpec {
            radius: 1.0,
            polar: (PI / 2.0 - 0.01, PI / 2.0 + 0.01),
            azimuth: (-0.01, 0.01),
        };
        let rcv = make_receiver_array(patch, 1).unwrap();
        assert!(rcv.positions[0].distance(Point3::new(1.0, 0.0, 0.0)) < 1e-12);
        assert!((rcv.weights[0] - 4e-4).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_receiver_array(PatchSpec::paper_default(), 0).is_err());
        let mut p = PatchSpec::paper_default();
        p.polar = (1.0, 1.0);
        assert!(make_receiver_array(p, 4).is_err());
        p = PatchSpec::paper_default();
        p.radius = -1.0;
        assert!(make_receiver_array(p, 4).is_err());
    }

    proptest::proptest! {
        #[test]
        fn weights_sum_to_patch_area(
            n in 1usize..400,
            t0 in 0.0f64..1.5,
            dt in 0.01f64..1.6,
            p0 in -3.0f64..0.0,
            dp in 0.01f64..3.0,
            r in 0.1f64..50.0,
        ) {
            let patch = PatchSpec { radius: r, polar: (t0, (t0 + dt).min(PI)), azimuth: (p0, p0 + dp) };
            let rcv = make_receiver_array(patch, n).unwrap();
            proptest::prop_assert_eq!(rcv.len(), n);
            let area = patch.area();
            proptest::prop_assert!(((rcv.total_weight() - area) / area).abs() < 1e-9);
            proptest::prop_assert!(rcv.weights.iter().all(|w| *w > 0.0));
        }
    }
}
