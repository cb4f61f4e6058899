use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::Point3;
use crate::model::{SamplingMesh, WaveRecord};

use super::correlator::{Correlator, IndicatorParams};
use super::result::{Method, ReconPoint, ReconResult};
use super::schedule::parallel_schedule;
use super::search::{active_steps, ball_argmax, check_v_max, global_points, lattice_slack};

/// Dichotomy tuning. Level 0 is a global search at `t_{N_t}`; every slot of
/// level `i` searches the ball of its parent from level `i − 1`. Slots of a
/// level run concurrently, levels run in order. Steps the schedule never
/// reaches are filled afterwards from the nearest reconstructed neighbour.
pub fn reconstruct_parallel(record: &WaveRecord, mesh: &SamplingMesh, v_max: f64, params: &IndicatorParams) -> Result<ReconResult> {
    check_v_max(v_max)?;
    let corr = Correlator::new(record, *params)?;
    let (_, skipped) = active_steps(&corr);
    let schedule = parallel_schedule(record.n_steps(), v_max, record.grid.terminal())?;
    let slack = lattice_slack(mesh);

    // Search centre handed to children: the entry's own reconstruction, or its
    // parent's centre if the entry's step is silent.
    let mut centers: Vec<Option<(Point3, f64)>> = vec![None; schedule.entries.len()];
    let mut found: Vec<Option<ReconPoint>> = vec![None; schedule.entries.len()];
    for level in 0..schedule.levels() {
        let slots: Vec<usize> = schedule.level(level).map(|(k, _)| k).collect();
        let results: Vec<Result<Option<ReconPoint>>> = slots
            .par_iter()
            .map(|&k| {
                let e = &schedule.entries[k];
                if !corr.is_active(e.j) {
                    return Ok(None);
                }
                match e.parent.and_then(|p| centers[p].map(|c| (p, c))) {
                    None => Ok(Some(global_points(&corr, mesh, &[e.j])?.remove(0))),
                    Some((p, (center, t_center))) => {
                        let reach = v_max * (corr.time(e.j) - t_center).abs();
                        let radius = schedule.entries[p].radius.max(reach) + slack;
                        ball_argmax(&corr, mesh, e.j, center, radius).map(Some)
                    }
                }
            })
            .collect();
        for (&k, r) in slots.iter().zip(results) {
            let point = r?;
            centers[k] = match (&point, schedule.entries[k].parent) {
                (Some(pt), _) => Some((pt.z, pt.t)),
                (None, Some(p)) => centers[p],
                (None, None) => None,
            };
            found[k] = point;
        }
    }

    let mut points: Vec<ReconPoint> = found.into_iter().flatten().collect();
    points.sort_by_key(|p| p.j);
    let mut filled = Vec::new();
    for &j in &schedule.unvisited {
        if !corr.is_active(j) {
            continue;
        }
        let t = corr.time(j);
        let next = match points.iter().min_by_key(|p| (p.j.abs_diff(j), p.j)) {
            None => global_points(&corr, mesh, &[j])?.remove(0),
            Some(near) => ball_argmax(&corr, mesh, j, near.z, v_max * (t - near.t).abs() + slack)?,
        };
        let at = points.partition_point(|p| p.j < j);
        points.insert(at, next);
        filled.push(j);
    }

    Ok(ReconResult {
        method: Method::Parallel,
        points,
        skipped,
        filled,
        schedule: Some(schedule),
        v_max: Some(v_max),
    })
}
