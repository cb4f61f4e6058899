use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::model::MediumSpec;

/// Midpoint voxelization of the inclusion box with per-voxel contrast
/// `γ_q = ω0² (c(y_q)⁻² − c0⁻²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoxelGrid {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub centers: Vec<Point3>,
    pub volume: f64,
    pub contrast: Vec<f64>,
}

impl VoxelGrid {
    pub fn new(medium: &MediumSpec, omega0: f64, dims: [usize; 3]) -> Result<Self> {
        medium.validate()?;
        let inc = medium
            .inclusion
            .ok_or_else(|| Error::invalid("voxelization needs an inclusion"))?;
        if dims.contains(&0) {
            return Err(Error::invalid("voxel resolution must be positive"));
        }
        let low = inc.region.low().to_array();
        let size = inc.region.size.to_array();
        let spacing = [
            size[0] / dims[0] as f64,
            size[1] / dims[1] as f64,
            size[2] / dims[2] as f64,
        ];
        let gamma = omega0 * omega0 * (inc.speed.powi(-2) - medium.c0.powi(-2));
        let mut centers = Vec::with_capacity(dims.iter().product());
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    centers.push(Point3::new(
                        low[0] + (i as f64 + 0.5) * spacing[0],
                        low[1] + (j as f64 + 0.5) * spacing[1],
                        low[2] + (k as f64 + 0.5) * spacing[2],
                    ));
                }
            }
        }
        let n = centers.len();
        Ok(Self {
            dims,
            spacing,
            centers,
            volume: spacing[0] * spacing[1] * spacing[2],
            contrast: vec![gamma; n],
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Radius of the ball with the volume of one voxel.
    pub fn equivalent_radius(&self) -> f64 {
        (3.0 * self.volume / (4.0 * std::f64::consts::PI)).cbrt()
    }

    pub fn max_contrast(&self) -> f64 {
        self.contrast.iter().fold(0.0, |a, g| a.max(g.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiles_the_box() {
        let m = MediumSpec::case_ii(330.0, 1500.0);
        let g = VoxelGrid::new(&m, 1.0, [20, 20, 20]).unwrap();
        assert_eq!(g.len(), 8000);
        assert!((g.volume * g.len() as f64 - 200.0).abs() < 1e-9);
        let region = m.inclusion.unwrap().region;
        assert!(g.centers.iter().all(|c| region.contains(*c)));
        let expected = 1500f64.powi(-2) - 330f64.powi(-2);
        assert!(g.contrast.iter().all(|&c| c == expected));
        assert!(VoxelGrid::new(&MediumSpec::homogeneous(330.0).unwrap(), 1.0, [2, 2, 2]).is_err());
    }
}
