use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::model::{SamplingMesh, WaveRecord};

use super::correlator::{Correlator, IndicatorParams};
use super::result::{Method, ReconPoint, ReconResult};

/// Extra ball radius that absorbs lattice quantization: the previous
/// reconstruction and the best lattice point of the next step can each sit
/// half a cell diagonal away from the true positions.
pub fn lattice_slack(mesh: &SamplingMesh) -> f64 {
    mesh.cell_diagonal()
}

/// Lattice point maximizing the indicator at step `j`.
pub fn grid_argmax(record: &WaveRecord, j: usize, mesh: &SamplingMesh, params: &IndicatorParams) -> Result<(Point3, f64)> {
    if j == 0 || j > record.n_steps() {
        return Err(Error::invalid(format!("step {j} outside 1..={}", record.n_steps())));
    }
    let corr = Correlator::new(record, *params)?;
    if !corr.is_active(j) {
        return Err(Error::UndefinedIndicator {
            step: j,
            reason: "silent column".into(),
        });
    }
    let all: Vec<usize> = (0..mesh.len()).collect();
    let (idx, v) = corr.argmax_many(mesh, &all, &[j])[0].ok_or_else(|| Error::UndefinedIndicator {
        step: j,
        reason: "every mesh point lies inside the receiver exclusion radius".into(),
    })?;
    Ok((mesh.point(idx), v))
}

pub(crate) fn active_steps(corr: &Correlator<'_>) -> (Vec<usize>, Vec<usize>) {
    (1..=corr.n_steps()).partition(|&j| corr.is_active(j))
}

/// Best lattice point for step `j` inside the ball around `center`.
pub(crate) fn ball_argmax(corr: &Correlator<'_>, mesh: &SamplingMesh, j: usize, center: Point3, radius: f64) -> Result<ReconPoint> {
    let candidates = mesh.ball(center, radius);
    let (idx, v) = corr.argmax_many(mesh, &candidates, &[j])[0].ok_or(Error::EmptyBall { radius })?;
    Ok(ReconPoint {
        j,
        t: corr.time(j),
        z: mesh.point(idx),
        indicator: v,
    })
}

pub(crate) fn global_points(corr: &Correlator<'_>, mesh: &SamplingMesh, steps: &[usize]) -> Result<Vec<ReconPoint>> {
    let all: Vec<usize> = (0..mesh.len()).collect();
    corr.argmax_many(mesh, &all, steps)
        .into_iter()
        .zip(steps)
        .map(|(best, &j)| {
            let (idx, v) = best.ok_or_else(|| Error::UndefinedIndicator {
                step: j,
                reason: "every mesh point lies inside the receiver exclusion radius".into(),
            })?;
            Ok(ReconPoint {
                j,
                t: corr.time(j),
                z: mesh.point(idx),
                indicator: v,
            })
        })
        .collect()
}

/// Independent global argmax at every time step.
pub fn reconstruct_global(record: &WaveRecord, mesh: &SamplingMesh, params: &IndicatorParams) -> Result<ReconResult> {
    let corr = Correlator::new(record, *params)?;
    let (steps, skipped) = active_steps(&corr);
    let points = global_points(&corr, mesh, &steps)?;
    Ok(ReconResult {
        method: Method::Global,
        points,
        skipped,
        filled: Vec::new(),
        schedule: None,
        v_max: None,
    })
}

pub(crate) fn check_v_max(v_max: f64) -> Result<()> {
    if v_max > 0.0 && v_max.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("v_max must be positive and finite, got {v_max}")))
    }
}

/// Time marching: global search at the first active step, then each step
/// searches the ball of radius `v_max (t_j − t_prev)` (plus lattice slack)
/// around the previous reconstruction.
pub fn reconstruct_sequential(record: &WaveRecord, mesh: &SamplingMesh, v_max: f64, params: &IndicatorParams) -> Result<ReconResult> {
    check_v_max(v_max)?;
    let corr = Correlator::new(record, *params)?;
    let (steps, skipped) = active_steps(&corr);
    let slack = lattice_slack(mesh);
    let mut points: Vec<ReconPoint> = Vec::with_capacity(steps.len());
    for &j in &steps {
        let next = match points.last() {
            None => global_points(&corr, mesh, &[j])?.remove(0),
            Some(prev) => {
                let radius = v_max * (corr.time(j) - prev.t) + slack;
                ball_argmax(&corr, mesh, j, prev.z, radius)?
            }
        };
        points.push(next);
    }
    Ok(ReconResult {
        method: Method::Sequential,
        points,
        skipped,
        filled: Vec::new(),
        schedule: None,
        v_max: Some(v_max),
    })
}
