use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::add_noise;
use crate::geometry::Point3;
use crate::imaging::{reconstruct, ReconResult};
use crate::model::{builtin_trajectory, make_receiver_array, ReceiverArray, WaveRecord};
use crate::scatter::synthesize_record_inhomogeneous;

use super::config::{ExperimentConfig, MediumCase};

/// The two probe receivers of the media comparison figure:
/// `(5, −5, 5√2)` and `(10, 0, 0)`.
pub fn paper_probes() -> Vec<Point3> {
    vec![Point3::new(5.0, -5.0, 5.0 * 2f64.sqrt()), Point3::new(10.0, 0.0, 0.0)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    pub position: Point3,
    /// Time series in the homogeneous, case-ii and case-iii media.
    pub u: [Vec<f64>; 3],
    pub max_abs_u0: f64,
    /// `max_j |u_k − u_0|` for cases ii and iii.
    pub max_deviation: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediaComparison {
    pub times: Vec<f64>,
    pub probes: Vec<ProbeSeries>,
    /// `max |u_k − u_0| / max |u_0|` over the whole receiver patch, cases ii and iii.
    pub patch_relative_deviation: [f64; 2],
    pub cell: f64,
    /// Per-step distances between reconstructions for the pairs
    /// (i, ii), (i, iii), (ii, iii), over steps present in both.
    pub recon_deltas: [Vec<f64>; 3],
    pub max_recon_delta: [f64; 3],
}

fn split(record: WaveRecord, patch: &ReceiverArray) -> Result<(WaveRecord, Vec<Vec<f64>>)> {
    let n_m = patch.len();
    let n_t = record.n_steps();
    let values = record.values();
    let probes = (n_m..record.n_receivers()).map(|m| record.row(m).to_vec()).collect();
    let patch_rec = WaveRecord::new(values[..n_m * n_t].to_vec(), patch.clone(), record.grid, record.meta.clone())?;
    Ok((patch_rec, probes))
}

fn deltas(a: &ReconResult, b: &ReconResult) -> Vec<f64> {
    a.points
        .iter()
        .filter_map(|p| b.point_at(p.j).map(|q| p.z.distance(q.z)))
        .collect()
}

/// Synthesizes the configured scenario in the three media with the
/// frequency-reduced model, then reconstructs each record with the same
/// noise seed and search. All three cases share scenario and acquisition by
/// construction.
pub fn compare_media(config: &ExperimentConfig, probes: &[Point3]) -> Result<MediaComparison> {
    config.validate()?;
    let truth = builtin_trajectory(config.scenario);
    let patch = make_receiver_array(config.patch, config.receivers)?;
    let mut all = patch.positions.clone();
    all.extend_from_slice(probes);
    let mut weights = patch.weights.clone();
    weights.extend(std::iter::repeat_n(1.0, probes.len()));
    let combined = ReceiverArray::from_points(all, weights)?;
    let grid = config.grid()?;
    let mesh = config.sampling_mesh()?;
    let v_max = config.vmax.unwrap_or(truth.v_max());
    let n = config.voxels;

    let mut records = Vec::new();
    let mut series = Vec::new();
    let mut recons = Vec::new();
    for case in MediumCase::ALL {
        let medium = case.spec(config.c0, config.inclusion_speed)?;
        let rec = synthesize_record_inhomogeneous(&truth, &combined, grid, &medium, config.omega0, [n, n, n])
            .map_err(|e| e.in_phase("synthesize"))?;
        let (rec, probe_rows) = split(rec, &patch)?;
        let noisy = add_noise(&rec, config.noise, config.seed).map_err(|e| e.in_phase("noise"))?;
        let recon = reconstruct(&noisy, &mesh, config.method, v_max, &config.indicator_params()).map_err(|e| e.in_phase("reconstruct"))?;
        records.push(rec);
        series.push(probe_rows);
        recons.push(recon);
    }

    let max_u0 = records[0].max_abs();
    if max_u0 == 0.0 {
        return Err(Error::invalid("homogeneous record is identically zero"));
    }
    let patch_dev = |k: usize| {
        records[0]
            .values()
            .iter()
            .zip(records[k].values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / max_u0
    };
    let probes = probes
        .iter()
        .enumerate()
        .map(|(p, &position)| {
            let u = [series[0][p].clone(), series[1][p].clone(), series[2][p].clone()];
            let dev = |k: usize| u[0].iter().zip(&u[k]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            ProbeSeries {
                position,
                max_abs_u0: u[0].iter().map(|v| v.abs()).fold(0.0, f64::max),
                max_deviation: [dev(1), dev(2)],
                u,
            }
        })
        .collect();
    let recon_deltas = [deltas(&recons[0], &recons[1]), deltas(&recons[0], &recons[2]), deltas(&recons[1], &recons[2])];
    let max_recon_delta = [0, 1, 2].map(|k| recon_deltas[k].iter().copied().fold(0.0, f64::max));
    Ok(MediaComparison {
        times: grid.times(),
        probes,
        patch_relative_deviation: [patch_dev(1), patch_dev(2)],
        cell: mesh.cell_size(),
        recon_deltas,
        max_recon_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::paper_default();
        c.steps = 10;
        c.receivers = 40;
        c.mesh = 17;
        c.voxels = 6;
        c
    }

    #[test]
    fn zero_contrast_cases_identical() {
        let mut c = small();
        c.inclusion_speed = c.c0;
        let cmp = compare_media(&c, &paper_probes()).unwrap();
        assert_eq!(cmp.patch_relative_deviation, [0.0, 0.0]);
        assert_eq!(cmp.max_recon_delta, [0.0, 0.0, 0.0]);
        for p in &cmp.probes {
            assert_eq!(p.u[0], p.u[1]);
            assert_eq!(p.u[0], p.u[2]);
        }
    }

    #[test]
    fn body_inclusion_is_a_small_perturbation() {
        let cmp = compare_media(&small(), &paper_probes()).unwrap();
        for p in &cmp.probes {
            assert!(p.max_deviation[0] <= 0.01 * p.max_abs_u0, "{p:?}");
        }
        assert!(cmp.patch_relative_deviation[0] < 0.01 && cmp.patch_relative_deviation[1] < 0.01);
        assert_eq!(cmp.recon_deltas[0].len(), 10);
    }
}
