use num_complex::Complex64;
use rayon::prelude::*;

use super::kernel::{helmholtz_fundamental, kernel_at};
use super::operator::LsOperator;
use super::voxel::VoxelGrid;
use super::DEFAULT_TOLERANCE;
use crate::error::{Error, Result};
use crate::forward::PotentialMode;
use crate::model::{ForwardKind, MediumSpec, ReceiverArray, RecordMeta, TimeGrid, Trajectory, WaveRecord};

pub const DEFAULT_VOXELS: [usize; 3] = [20, 20, 20];

/// Above this many receiver-voxel pairs the coupling rows are recomputed
/// per step instead of being cached.
const CACHED_COUPLING_LIMIT: usize = 4_000_000;

/// Record from the frequency-reduction ansatz
/// `u(x_m, t_j) = sin(ω0 t_j) Re û_{z0(t_j)}(x_m)`, with one volume-integral
/// solve per step and the source frozen at `z0(t_j)`.
///
/// Without an inclusion this is `sin(ω0 t_j) Re Φ(x_m, z0(t_j))`.
pub fn synthesize_record_inhomogeneous(
    traj: &Trajectory,
    rcv: &ReceiverArray,
    grid: TimeGrid,
    medium: &MediumSpec,
    omega0: f64,
    resolution: [usize; 3],
) -> Result<WaveRecord> {
    medium.validate()?;
    let k0 = omega0 / medium.c0;
    let times = grid.times();
    let n_t = times.len();
    let n_m = rcv.len();
    let mut values = vec![0.0; n_m * n_t];

    let columns: Vec<Vec<f64>> = match &medium.inclusion {
        None => times
            .par_iter()
            .map(|&t| {
                let z = traj.position_clamped(t);
                let amp = (omega0 * t).sin();
                rcv.positions
                    .iter()
                    .map(|&x| Ok(amp * helmholtz_fundamental(x, z, k0)?.re))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?,
        Some(inc) => {
            let voxels = VoxelGrid::new(medium, omega0, resolution)?;
            if let Some(m) = rcv.positions.iter().position(|&x| inc.region.contains(x)) {
                return Err(Error::invalid(format!("receiver {m} lies inside the inclusion")));
            }
            let op = LsOperator::new(&voxels, k0);
            let weight = |q: usize| voxels.contrast[q] * voxels.volume;
            let coupling_row = |x: crate::geometry::Point3| -> Vec<Complex64> {
                (0..voxels.len())
                    .map(|q| kernel_at(x.distance(voxels.centers[q]), k0) * weight(q))
                    .collect()
            };
            let cached: Option<Vec<Vec<Complex64>>> = (n_m * voxels.len() <= CACHED_COUPLING_LIMIT)
                .then(|| rcv.positions.par_iter().map(|&x| coupling_row(x)).collect());
            let mut cols = Vec::with_capacity(n_t);
            for (j, &t) in times.iter().enumerate() {
                let z = traj.position_clamped(t);
                if inc.region.contains(z) {
                    return Err(Error::invalid(format!("emitter enters the inclusion at t = {t}")));
                }
                let sol = op.solve(z, DEFAULT_TOLERANCE).map_err(|e| Error::RecordCell {
                    receiver: 0,
                    step: j + 1,
                    source: Box::new(e),
                })?;
                let amp = (omega0 * t).sin();
                let col = rcv
                    .positions
                    .par_iter()
                    .enumerate()
                    .map(|(m, &x)| {
                        let scattered: Complex64 = match &cached {
                            Some(rows) => rows[m].iter().zip(&sol.total).map(|(a, b)| a * b).sum(),
                            None => coupling_row(x).iter().zip(&sol.total).map(|(a, b)| a * b).sum(),
                        };
                        Ok(amp * (helmholtz_fundamental(x, z, k0)? + scattered).re)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                cols.push(col);
            }
            cols
        }
    };
    for (j, col) in columns.iter().enumerate() {
        for (m, v) in col.iter().enumerate() {
            values[m * n_t + j] = *v;
        }
    }
    let meta = RecordMeta {
        omega0,
        c0: medium.c0,
        noise: 0.0,
        seed: 0,
        trajectory_id: traj.id().to_string(),
        forward: ForwardKind::FrequencyReduction,
        mode: PotentialMode::default(),
        medium: Some(*medium),
    };
    WaveRecord::new(values, rcv.clone(), grid, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::model::{builtin_trajectory, ScenarioId};
    use crate::scatter::{eval_total_field, solve_lippmann_schwinger};

    #[test]
    fn homogeneous_matches_pointwise_kernel() {
        let traj = builtin_trajectory(ScenarioId::LetterC);
        let rcv = ReceiverArray::from_points(vec![Point3::new(10.0, 0.0, 0.0)], vec![1.0]).unwrap();
        let grid = TimeGrid::new(10.0, 10).unwrap();
        let medium = MediumSpec::homogeneous(330.0).unwrap();
        let rec = synthesize_record_inhomogeneous(&traj, &rcv, grid, &medium, 1.0, DEFAULT_VOXELS).unwrap();
        for j in 1..=10 {
            let t = grid.time(j);
            let z = traj.position_clamped(t);
            let expected = t.sin() * helmholtz_fundamental(rcv.positions[0], z, 1.0 / 330.0).unwrap().re;
            assert_eq!(rec.get(0, j), expected);
        }
    }

    #[test]
    fn cached_rows_agree_with_direct_evaluation() {
        let traj = builtin_trajectory(ScenarioId::LetterC);
        let x = Point3::new(5.0, -5.0, 5.0 * 2f64.sqrt());
        let rcv = ReceiverArray::from_points(vec![x], vec![1.0]).unwrap();
        let grid = TimeGrid::new(10.0, 4).unwrap();
        let medium = MediumSpec::case_ii(330.0, 500.0);
        let rec = synthesize_record_inhomogeneous(&traj, &rcv, grid, &medium, 1.0, [6, 6, 6]).unwrap();
        let voxels = VoxelGrid::new(&medium, 1.0, [6, 6, 6]).unwrap();
        for j in 1..=4 {
            let t = grid.time(j);
            let z = traj.position_clamped(t);
            let sol = solve_lippmann_schwinger(z, &voxels, 1.0 / 330.0, DEFAULT_TOLERANCE).unwrap();
            let expected = t.sin() * eval_total_field(&sol, &voxels, z, x).unwrap().re;
            assert!((rec.get(0, j) - expected).abs() < 1e-14 * expected.abs().max(1e-3));
        }
    }
}
