use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::model::{SamplingMesh, WaveRecord};

pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.5;

/// Columns whose weighted norm falls below this fraction of the largest
/// column norm are treated as carrying no signal.
pub(crate) const SILENT_COLUMN_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorParams {
    /// Probe frequency of the test function, rad/s.
    pub omega0: f64,
    /// Sampling points closer than this to any receiver are not evaluated, m.
    pub exclusion_radius: f64,
}

impl IndicatorParams {
    pub fn new(omega0: f64) -> Self {
        Self {
            omega0,
            exclusion_radius: DEFAULT_EXCLUSION_RADIUS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) || !(self.exclusion_radius >= 0.0) {
            return Err(Error::invalid("indicator needs omega0 > 0 and a non-negative exclusion radius"));
        }
        Ok(())
    }
}

/// Static point-source test function `sin(ω0 t) / (4π |x − z|)`.
pub fn test_function(x: Point3, t: f64, z: Point3, omega0: f64) -> Result<f64> {
    let d = x.distance(z);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok((omega0 * t).sin() / (4.0 * PI * d))
}

/// Receiver column prepared for correlation: `u_m Δs_m` and the weighted
/// norm `(Σ u_m² Δs_m)^{1/2}`.
#[derive(Debug, Clone)]
pub(crate) struct PreparedColumn {
    pub weighted: Vec<f64>,
    pub norm: f64,
}

impl PreparedColumn {
    pub fn new(values: &[f64], weights: &[f64]) -> Self {
        let weighted: Vec<f64> = values.iter().zip(weights).map(|(u, w)| u * w).collect();
        let norm = values.iter().zip(weights).map(|(u, w)| u * u * w).sum::<f64>().sqrt();
        Self { weighted, norm }
    }
}

/// Inverse receiver distances from `z` and `Σ_m Δs_m / |x_m − z|²`, or the
/// first receiver inside the exclusion radius.
#[inline]
pub(crate) fn probe(
    receivers: &[Point3],
    weights: &[f64],
    z: Point3,
    exclusion: f64,
    inv: &mut [f64],
) -> std::result::Result<f64, usize> {
    let mut phi2 = 0.0;
    for (m, (x, w)) in receivers.iter().zip(weights).enumerate() {
        let d = x.distance(z);
        if d <= exclusion || d == 0.0 {
            return Err(m);
        }
        let r = 1.0 / d;
        inv[m] = r;
        phi2 += w * r * r;
    }
    Ok(phi2)
}

/// Normalized correlation of a prepared column with a probe. The common
/// factor `sin(ω0 t) / 4π` of the test function cancels between numerator
/// and denominator.
#[inline]
pub(crate) fn correlate(col: &PreparedColumn, inv: &[f64], phi2: f64) -> f64 {
    let num: f64 = col.weighted.iter().zip(inv).map(|(a, b)| a * b).sum();
    (num.abs() / (col.norm * phi2.sqrt())).min(1.0)
}

/// Discrete indicator
/// `|Σ u_mj φ_m Δs_m| / ((Σ u_mj² Δs_m)^{1/2} (Σ φ_m² Δs_m)^{1/2})`
/// at step `j` (1-based) and sampling point `z`.
pub fn indicator(record: &WaveRecord, j: usize, z: Point3, params: &IndicatorParams) -> Result<f64> {
    params.validate()?;
    if j == 0 || j > record.n_steps() {
        return Err(Error::invalid(format!("step {j} outside 1..={}", record.n_steps())));
    }
    let t = record.grid.time(j);
    if (params.omega0 * t).sin() == 0.0 {
        return Err(Error::UndefinedIndicator {
            step: j,
            reason: "test function vanishes".into(),
        });
    }
    let col = PreparedColumn::new(&record.column(j), &record.receivers.weights);
    if col.norm == 0.0 {
        return Err(Error::UndefinedIndicator {
            step: j,
            reason: "column is identically zero".into(),
        });
    }
    let mut inv = vec![0.0; record.n_receivers()];
    let phi2 = probe(&record.receivers.positions, &record.receivers.weights, z, params.exclusion_radius, &mut inv)
        .map_err(|receiver| Error::NearReceiver { receiver })?;
    Ok(correlate(&col, &inv, phi2))
}

/// A record prepared for repeated indicator evaluations.
pub struct Correlator<'a> {
    record: &'a WaveRecord,
    params: IndicatorParams,
    columns: Vec<Option<PreparedColumn>>,
}

const CHUNK: usize = 1024;

impl<'a> Correlator<'a> {
    pub fn new(record: &'a WaveRecord, params: IndicatorParams) -> Result<Self> {
        params.validate()?;
        let weights = &record.receivers.weights;
        let prepared: Vec<PreparedColumn> = (1..=record.n_steps())
            .map(|j| PreparedColumn::new(&record.column(j), weights))
            .collect();
        let max_norm = prepared.iter().map(|c| c.norm).fold(0.0, f64::max);
        let columns = prepared
            .into_iter()
            .enumerate()
            .map(|(i, col)| {
                let t = record.grid.time(i + 1);
                let silent = col.norm == 0.0 || col.norm < SILENT_COLUMN_RATIO * max_norm || (params.omega0 * t).sin() == 0.0;
                (!silent).then_some(col)
            })
            .collect();
        Ok(Self { record, params, columns })
    }

    pub fn record(&self) -> &WaveRecord {
        self.record
    }

    pub fn params(&self) -> &IndicatorParams {
        &self.params
    }

    pub fn n_steps(&self) -> usize {
        self.columns.len()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.record.grid.time(j)
    }

    /// Whether step `j` carries usable signal.
    pub fn is_active(&self, j: usize) -> bool {
        self.columns[j - 1].is_some()
    }

    pub fn value(&self, j: usize, z: Point3) -> Result<f64> {
        let col = self.columns[j - 1].as_ref().ok_or_else(|| Error::UndefinedIndicator {
            step: j,
            reason: "silent column".into(),
        })?;
        let rcv = &self.record.receivers;
        let mut inv = vec![0.0; rcv.len()];
        let phi2 = probe(&rcv.positions, &rcv.weights, z, self.params.exclusion_radius, &mut inv)
            .map_err(|receiver| Error::NearReceiver { receiver })?;
        Ok(correlate(col, &inv, phi2))
    }

    /// Best `(flat index, value)` per requested step over the candidate
    /// lattice points. Ties go to the smaller flat index, i.e. the
    /// lexicographically smallest point.
    pub(crate) fn argmax_many(&self, mesh: &SamplingMesh, candidates: &[usize], steps: &[usize]) -> Vec<Option<(usize, f64)>> {
        let rcv = &self.record.receivers;
        let cols: Vec<&PreparedColumn> = steps
            .iter()
            .map(|&j| self.columns[j - 1].as_ref().expect("active step"))
            .collect();
        let merge = |mut a: Vec<Option<(usize, f64)>>, b: Vec<Option<(usize, f64)>>| {
            for (x, y) in a.iter_mut().zip(b) {
                if let Some((bi, bv)) = y {
                    match x {
                        Some((ai, av)) if *av > bv || (*av == bv && *ai < bi) => {}
                        _ => *x = Some((bi, bv)),
                    }
                }
            }
            a
        };
        candidates
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut inv = vec![0.0; rcv.len()];
                let mut best: Vec<Option<(usize, f64)>> = vec![None; steps.len()];
                for &idx in chunk {
                    let z = mesh.point(idx);
                    let Ok(phi2) = probe(&rcv.positions, &rcv.weights, z, self.params.exclusion_radius, &mut inv) else {
                        continue;
                    };
                    for (slot, col) in best.iter_mut().zip(&cols) {
                        let v = correlate(col, &inv, phi2);
                        match slot {
                            Some((_, bv)) if *bv >= v => {}
                            _ => *slot = Some((idx, v)),
                        }
                    }
                }
                best
            })
            .reduce(|| vec![None; steps.len()], merge)
    }
}
