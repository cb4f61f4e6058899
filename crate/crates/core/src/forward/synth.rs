use rayon::prelude::*;

use super::retarded::{approx_field, retarded_potential, PotentialMode, SourceSignal};
use crate::error::{Error, Result};
use crate::model::{ForwardKind, MediumSpec, ReceiverArray, RecordMeta, TimeGrid, Trajectory, WaveRecord};

fn cell_error(receiver: usize, step: usize, err: Error) -> Error {
    Error::RecordCell {
        receiver,
        step,
        source: Box::new(err),
    }
}

/// Retarded-potential samples at every receiver for a single instant.
pub fn synthesize_column(
    traj: &Trajectory,
    rcv: &ReceiverArray,
    t: f64,
    c0: f64,
    signal: SourceSignal,
    mode: PotentialMode,
) -> Result<Vec<f64>> {
    rcv.positions
        .iter()
        .map(|&x| retarded_potential(x, t, traj, c0, signal, mode))
        .collect()
}

/// Record of the moving source in a homogeneous background,
/// `values[m][j] = u0(x_m, t_j)`.
pub fn synthesize_record(
    traj: &Trajectory,
    rcv: &ReceiverArray,
    grid: TimeGrid,
    medium: &MediumSpec,
    signal: SourceSignal,
    mode: PotentialMode,
) -> Result<WaveRecord> {
    medium.validate()?;
    if medium.inclusion.is_some() {
        return Err(Error::invalid(
            "retarded-potential synthesis needs a homogeneous medium; use the scattering solver",
        ));
    }
    let c0 = medium.c0;
    let times = grid.times();
    let rows: Vec<Vec<f64>> = rcv
        .positions
        .par_iter()
        .enumerate()
        .map(|(m, &x)| {
            times
                .iter()
                .enumerate()
                .map(|(j, &t)| retarded_potential(x, t, traj, c0, signal, mode).map_err(|e| cell_error(m, j + 1, e)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let meta = RecordMeta {
        omega0: signal.omega0,
        c0,
        noise: 0.0,
        seed: 0,
        trajectory_id: traj.id().to_string(),
        forward: ForwardKind::RetardedPotential,
        mode,
        medium: None,
    };
    WaveRecord::new(rows.concat(), rcv.clone(), grid, meta)
}

/// Record built from the leading-order static-kernel field.
pub fn synthesize_approx_record(
    traj: &Trajectory,
    rcv: &ReceiverArray,
    grid: TimeGrid,
    omega0: f64,
    c0: f64,
) -> Result<WaveRecord> {
    let times = grid.times();
    let rows: Vec<Vec<f64>> = rcv
        .positions
        .iter()
        .enumerate()
        .map(|(m, &x)| {
            times
                .iter()
                .enumerate()
                .map(|(j, &t)| approx_field(x, t, traj, omega0).map_err(|e| cell_error(m, j + 1, e)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let meta = RecordMeta {
        omega0,
        c0,
        noise: 0.0,
        seed: 0,
        trajectory_id: traj.id().to_string(),
        forward: ForwardKind::ApproxField,
        mode: PotentialMode::default(),
        medium: None,
    };
    WaveRecord::new(rows.concat(), rcv.clone(), grid, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::add_noise;
    use crate::geometry::Point3;
    use crate::model::{builtin_trajectory, make_receiver_array, PatchSpec, ScenarioId};

    fn letter_c_record(n_steps: usize) -> WaveRecord {
        let traj = builtin_trajectory(ScenarioId::LetterC);
        let rcv = make_receiver_array(PatchSpec::paper_default(), 200).unwrap();
        let grid = TimeGrid::new(10.0, n_steps).unwrap();
        let medium = MediumSpec::homogeneous(330.0).unwrap();
        let sig = SourceSignal::new(1.0, 10.0).unwrap();
        synthesize_record(&traj, &rcv, grid, &medium, sig, PotentialMode::default()).unwrap()
    }

    #[test]
    fn early_single_cell_is_silent() {
        let traj = builtin_trajectory(ScenarioId::LetterC);
        let rcv = ReceiverArray::from_points(vec![Point3::new(10.0, 0.0, 0.0)], vec![1.0]).unwrap();
        let grid = TimeGrid::new(0.01, 1).unwrap();
        let medium = MediumSpec::homogeneous(330.0).unwrap();
        let sig = SourceSignal::new(1.0, 10.0).unwrap();
        let rec = synthesize_record(&traj, &rcv, grid, &medium, sig, PotentialMode::default()).unwrap();
        assert_eq!(rec.values(), &[0.0]);
    }

    #[test]
    fn letter_c_dimensions_and_peak() {
        let rec = letter_c_record(100);
        assert_eq!((rec.n_receivers(), rec.n_steps()), (200, 100));
        let traj = builtin_trajectory(ScenarioId::LetterC);
        // closest approach between the receiver set and the path
        let mut min_dist = f64::INFINITY;
        for x in &rec.receivers.positions {
            for i in 0..=10_000 {
                let z = traj.position_clamped(i as f64 * 1e-3);
                min_dist = min_dist.min(x.distance(z));
            }
        }
        let bound = 1.0 / (4.0 * std::f64::consts::PI * min_dist);
        let peak = rec.max_abs();
        assert!(peak <= bound * 1.01, "{peak} vs {bound}");
        assert!(peak >= bound * 0.9, "{peak} vs {bound}");
    }

    #[test]
    fn refined_grid_reproduces_shared_times() {
        let coarse = letter_c_record(20);
        let fine = letter_c_record(40);
        for m in 0..coarse.n_receivers() {
            for j in 1..=20 {
                assert_eq!(coarse.get(m, j), fine.get(m, 2 * j));
            }
        }
    }

    #[test]
    fn inclusion_rejected() {
        let traj = builtin_trajectory(ScenarioId::LetterC);
        let rcv = make_receiver_array(PatchSpec::paper_default(), 4).unwrap();
        let grid = TimeGrid::new(10.0, 10).unwrap();
        let sig = SourceSignal::new(1.0, 10.0).unwrap();
        let medium = MediumSpec::case_ii(330.0, 1500.0);
        assert!(synthesize_record(&traj, &rcv, grid, &medium, sig, PotentialMode::default()).is_err());
    }

    #[test]
    fn noise_properties() {
        let rec = letter_c_record(100);
        let same = add_noise(&rec, 0.0, 9).unwrap();
        assert_eq!(same.values(), rec.values());

        let noisy = add_noise(&rec, 0.05, 1).unwrap();
        assert_eq!(noisy.n_receivers(), rec.n_receivers());
        assert_eq!(noisy.grid, rec.grid);
        assert_eq!(noisy.receivers, rec.receivers);
        assert_eq!((noisy.meta.noise, noisy.meta.seed), (0.05, 1));
        let mut other = noisy.meta.clone();
        other.noise = 0.0;
        other.seed = 0;
        assert_eq!(other, rec.meta);
        for (a, b) in noisy.values().iter().zip(rec.values()) {
            assert!((a - b).abs() <= 0.05 * b.abs());
        }
        // draws are reproducible and cell-addressed
        assert_eq!(add_noise(&rec, 0.05, 1).unwrap().values(), noisy.values());
        assert_ne!(add_noise(&rec, 0.05, 2).unwrap().values(), noisy.values());
    }

    #[test]
    fn noise_mean_within_clt_bound() {
        let n = 20_000usize;
        let mean: f64 = (0..n).map(|c| crate::forward::cell_uniform(7, c / 100, c % 100 + 1)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 / (3.0 * n as f64).sqrt());
    }

    #[test]
    fn negative_noise_rejected() {
        let rec = letter_c_record(10);
        assert!(add_noise(&rec, -0.1, 1).is_err());
    }
}
