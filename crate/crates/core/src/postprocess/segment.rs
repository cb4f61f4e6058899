use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::model::TimeGrid;

use super::fourier::{fourier_fit, FourierCurve};

pub const DEFAULT_GAP_FACTOR: f64 = 3.0;
pub const DEFAULT_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSet {
    /// Contiguous, ordered, disjoint index ranges over the point sequence.
    pub ranges: Vec<Range<usize>>,
    /// One curve per range once smoothed; empty for a bare segmentation.
    pub curves: Vec<FourierCurve>,
}

impl SegmentSet {
    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Segments whose fit had to drop to a lower order.
    pub fn reduced(&self) -> Vec<usize> {
        self.curves.iter().enumerate().filter(|(_, c)| c.is_reduced()).map(|(i, _)| i).collect()
    }

    /// Smoothed position at `t`, from the segment whose time domain holds it.
    /// Times before the first domain use the first curve.
    pub fn eval(&self, t: f64) -> Option<Point3> {
        let k = self.curves.iter().rposition(|c| c.domain().0 < t).unwrap_or(0);
        self.curves.get(k).map(|c| c.eval(t))
    }

    /// Total squared residual of the curves on their own points.
    pub fn residual(&self, points: &[(f64, Point3)]) -> f64 {
        self.ranges
            .iter()
            .zip(&self.curves)
            .map(|(r, c)| c.residual(&points[r.clone()]))
            .sum()
    }

    /// Curve samples at the given points' times, tagged with the segment index.
    pub fn sample(&self, points: &[(f64, Point3)]) -> Vec<(usize, f64, Point3)> {
        self.ranges
            .iter()
            .zip(&self.curves)
            .enumerate()
            .flat_map(|(s, (r, c))| points[r.clone()].iter().map(move |&(t, _)| (s, t, c.eval(t))))
            .collect()
    }
}

/// Splits the sequence where consecutive points are more than `factor` times
/// the mean consecutive distance apart.
pub fn segment_gaps(points: &[(f64, Point3)], factor: f64) -> Result<SegmentSet> {
    if !(factor > 1.0) {
        return Err(Error::invalid(format!("gap factor must exceed 1, got {factor}")));
    }
    let n = points.len();
    if n < 2 {
        return Ok(SegmentSet {
            ranges: if n == 0 { vec![] } else { vec![0..1] },
            curves: vec![],
        });
    }
    let steps: Vec<f64> = points.windows(2).map(|w| w[0].1.distance(w[1].1)).collect();
    let mean = steps.iter().sum::<f64>() / steps.len() as f64;
    let mut ranges = Vec::new();
    let mut start = 0;
    for (i, &d) in steps.iter().enumerate() {
        if d > factor * mean {
            ranges.push(start..i + 1);
            start = i + 1;
        }
    }
    ranges.push(start..n);
    Ok(SegmentSet { ranges, curves: vec![] })
}

/// Fills skipped grid steps by linear interpolation between the nearest
/// reconstructed neighbours (constant beyond the ends).
pub fn fill_skipped(points: &[(usize, Point3)], grid: TimeGrid) -> Result<Vec<(f64, Point3)>> {
    if points.is_empty() {
        return Err(Error::invalid("no reconstructed points to interpolate from"));
    }
    let mut out = Vec::with_capacity(grid.n_steps());
    let mut k = 0;
    for j in 1..=grid.n_steps() {
        while k + 1 < points.len() && points[k + 1].0 <= j {
            k += 1;
        }
        let (j0, z0) = points[k];
        let z = if j <= j0 || k + 1 == points.len() {
            z0
        } else {
            let (j1, z1) = points[k + 1];
            z0.lerp(z1, (j - j0) as f64 / (j1 - j0) as f64)
        };
        out.push((grid.time(j), z));
    }
    Ok(out)
}

fn fit_range(points: &[(f64, Point3)], order: usize, shift: f64, span: f64) -> Result<FourierCurve> {
    let usable = (points.len() - 1) / 2;
    let local: Vec<(f64, Point3)> = points.iter().map(|&(t, z)| (t - shift, z)).collect();
    let mut curve = fourier_fit(&local, span, order.min(usable))?;
    curve.shift = shift;
    curve.requested_order = order;
    Ok(curve)
}

/// Truncated Fourier smoothing over `(0, T]`, or per segment when
/// `segmented`, each segment's times shifted onto `(0, T_seg]` with
/// `T_seg` its own duration. Orders above `(count − 1) / 2` are reduced.
pub fn smooth(points: &[(f64, Point3)], terminal: f64, order: usize, segmented: bool) -> Result<SegmentSet> {
    if points.is_empty() {
        return Err(Error::invalid("nothing to smooth"));
    }
    if !segmented {
        let curve = fit_range(points, order, 0.0, terminal)?;
        return Ok(SegmentSet {
            ranges: vec![0..points.len()],
            curves: vec![curve],
        });
    }
    let dt = terminal / points.len() as f64;
    let ranges = segment_gaps(points, DEFAULT_GAP_FACTOR)?.ranges;
    if ranges.len() == 1 {
        return smooth(points, terminal, order, false);
    }
    let curves = ranges
        .par_iter()
        .map(|r| {
            let seg = &points[r.clone()];
            // A segment's time span includes the step leading into its first point.
            let shift = seg[0].0 - dt;
            let span = seg[seg.len() - 1].0 - shift;
            fit_range(seg, order, shift, span)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SegmentSet { ranges, curves })
}
