use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::imaging::ReconResult;
use crate::model::Trajectory;

use super::segment::SegmentSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    /// `|z_j − z0(t_j)|` per reconstructed point, m.
    pub distances: Vec<f64>,
    pub mean: f64,
    pub max: f64,
    /// Length of one lattice cell used for the fractions below, m.
    pub cell: f64,
    pub within_one_cell: f64,
    pub within_two_cells: f64,
    /// Hausdorff distance between the raw points and the true samples, m.
    pub hausdorff_raw: f64,
    /// Same for the smoothed curve samples, when smoothing was applied.
    pub hausdorff_smoothed: Option<f64>,
}

impl ErrorMetrics {
    pub fn fraction_within(&self, radius: f64) -> f64 {
        let hits = self.distances.iter().filter(|&&d| d <= radius).count();
        hits as f64 / self.distances.len() as f64
    }
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Point3], b: &[Point3]) -> f64 {
    let directed = |p: &[Point3], q: &[Point3]| {
        p.iter()
            .map(|x| q.iter().map(|y| x.distance(*y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

pub fn trajectory_error(result: &ReconResult, truth: &Trajectory, cell: f64, smoothed: Option<&SegmentSet>) -> Result<ErrorMetrics> {
    if result.is_empty() {
        return Err(Error::invalid("no reconstructed points to evaluate"));
    }
    let truth_pts: Vec<Point3> = result.points.iter().map(|p| truth.position_clamped(p.t)).collect();
    let distances: Vec<f64> = result.points.iter().zip(&truth_pts).map(|(p, q)| p.z.distance(*q)).collect();
    let n = distances.len() as f64;
    let mean = distances.iter().sum::<f64>() / n;
    let max = distances.iter().copied().fold(0.0, f64::max);
    let hausdorff_raw = hausdorff(&result.positions(), &truth_pts);
    let hausdorff_smoothed = smoothed.filter(|s| !s.curves.is_empty()).map(|s| {
        let curve: Vec<Point3> = result.points.iter().filter_map(|p| s.eval(p.t)).collect();
        hausdorff(&curve, &truth_pts)
    });
    let mut m = ErrorMetrics {
        distances,
        mean,
        max,
        cell,
        within_one_cell: 0.0,
        within_two_cells: 0.0,
        hausdorff_raw,
        hausdorff_smoothed,
    };
    m.within_one_cell = m.fraction_within(cell);
    m.within_two_cells = m.fraction_within(2.0 * cell);
    Ok(m)
}
