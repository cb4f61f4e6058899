use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::model::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetardedSolveParams {
    /// Stopping threshold on successive iterates, seconds.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RetardedSolveParams {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

/// Which inner product enters the Doppler factor of the retarded potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialMode {
    /// `1 − ⟨(x − z)/|x − z|, v⟩ / c0`, the standard moving-source factor.
    #[default]
    NormalizedDirection,
    /// `1 − ⟨x − z, v⟩ / c0` with the unnormalized separation.
    PaperLiteral,
}

impl std::str::FromStr for PotentialMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized-direction" | "normalized" => Ok(PotentialMode::NormalizedDirection),
            "paper-literal" | "literal" => Ok(PotentialMode::PaperLiteral),
            other => Err(Error::invalid(format!("unknown potential mode `{other}`"))),
        }
    }
}

/// Causal time-harmonic emission `λ(t) = sin(ω0 t)` on `(0, stop]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSignal {
    pub omega0: f64,
    pub stop_time: f64,
}

impl SourceSignal {
    pub fn new(omega0: f64, stop_time: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::invalid(format!("omega0 must be positive, got {omega0}")));
        }
        Ok(Self { omega0, stop_time })
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        if t <= 0.0 || t > self.stop_time {
            0.0
        } else {
            (self.omega0 * t).sin()
        }
    }
}

fn check_speed(traj: &Trajectory, c0: f64) -> Result<()> {
    if !(traj.v_max() < c0) {
        return Err(Error::invalid(format!(
            "emitter speed bound {} must be below the wave speed {c0}",
            traj.v_max()
        )));
    }
    Ok(())
}

/// Fixed-point iterates `τ_{k+1} = t − |x − z0(τ_k)| / c0` from `τ_0 = t`,
/// up to and including the first one closer than `tolerance` to its
/// predecessor.
pub fn retarded_time_trace(
    x: Point3,
    traj: &Trajectory,
    t: f64,
    c0: f64,
    params: RetardedSolveParams,
) -> Result<Vec<f64>> {
    check_speed(traj, c0)?;
    let mut iterates = vec![t];
    let mut tau = t;
    let mut last_step = f64::INFINITY;
    for _ in 0..params.max_iterations {
        let next = t - x.distance(traj.position_clamped(tau)) / c0;
        last_step = (next - tau).abs();
        iterates.push(next);
        tau = next;
        if last_step < params.tolerance {
            return Ok(iterates);
        }
    }
    Err(Error::RetardedTimeDiverged {
        iterations: params.max_iterations,
        last_step,
    })
}

/// Emission time of the signal observed at `(x, t)`.
///
/// The map is a contraction with factor `v_max / c0`, so stopping on a step
/// below the tolerance also bounds the equation residual by it. Values at
/// or below zero are returned as is; causality is applied by the signal.
pub fn retarded_time(x: Point3, traj: &Trajectory, t: f64, c0: f64, params: RetardedSolveParams) -> Result<f64> {
    check_speed(traj, c0)?;
    let mut tau = t;
    let mut last_step = f64::INFINITY;
    for _ in 0..params.max_iterations {
        let next = t - x.distance(traj.position_clamped(tau)) / c0;
        last_step = (next - tau).abs();
        tau = next;
        if last_step < params.tolerance {
            return Ok(tau);
        }
    }
    Err(Error::RetardedTimeDiverged {
        iterations: params.max_iterations,
        last_step,
    })
}

/// Field of the moving point source at `(x, t)`:
/// `λ(τ) / (4π |x − z0(τ)| (1 − ⟨d, v(τ)⟩ / c0))`.
pub fn retarded_potential(
    x: Point3,
    t: f64,
    traj: &Trajectory,
    c0: f64,
    signal: SourceSignal,
    mode: PotentialMode,
) -> Result<f64> {
    retarded_potential_with(x, t, traj, c0, signal, mode, RetardedSolveParams::default())
}

pub(crate) fn retarded_potential_with(
    x: Point3,
    t: f64,
    traj: &Trajectory,
    c0: f64,
    signal: SourceSignal,
    mode: PotentialMode,
    params: RetardedSolveParams,
) -> Result<f64> {
    let tau = retarded_time(x, traj, t, c0, params)?;
    if tau <= 0.0 || tau > signal.stop_time {
        return Ok(0.0);
    }
    let amplitude = signal.amplitude(tau);
    let (z, v) = traj.state_clamped(tau);
    let sep = x - z;
    let dist = sep.norm();
    if dist == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let projection = match mode {
        PotentialMode::NormalizedDirection => sep.dot(v) / dist,
        PotentialMode::PaperLiteral => sep.dot(v),
    };
    let denominator = 1.0 - projection / c0;
    if denominator <= 0.0 {
        return Err(Error::NonPositiveDenominator(denominator));
    }
    Ok(amplitude / (4.0 * PI * dist * denominator))
}

/// Leading-order static-kernel field `sin(ω0 t) / (4π |x − z0(t)|)`.
pub fn approx_field(x: Point3, t: f64, traj: &Trajectory, omega0: f64) -> Result<f64> {
    let z = traj.position_clamped(t);
    let dist = x.distance(z);
    if dist == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok((omega0 * t).sin() / (4.0 * PI * dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_y(terminal: f64) -> Trajectory {
        Trajectory::sampled(
            "line",
            vec![(0.0, Point3::ORIGIN), (terminal, Point3::new(0.0, terminal, 0.0))],
        )
        .unwrap()
    }

    /// Bisection on `g(τ) = τ − t + |x − z0(τ)| / c0`, increasing in τ for v < c0.
    fn bisect_tau(x: Point3, traj: &Trajectory, t: f64, c0: f64) -> f64 {
        let g = |tau: f64| tau - t + x.distance(traj.position_clamped(tau)) / c0;
        let (mut lo, mut hi) = (t - 1e3, t);
        assert!(g(lo) < 0.0 && g(hi) >= 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn static_source_closed_forms() {
        let p = RetardedSolveParams::default();
        let src = Trajectory::stationary(Point3::new(330.0, 0.0, 0.0), 10.0).unwrap();
        assert_eq!(retarded_time(Point3::ORIGIN, &src, 2.0, 330.0, p).unwrap(), 1.0);
        let origin = Trajectory::stationary(Point3::ORIGIN, 10.0).unwrap();
        let tau = retarded_time(Point3::new(10.0, 0.0, 0.0), &origin, 2.0, 330.0, p).unwrap();
        assert!((tau - (2.0 - 10.0 / 330.0)).abs() < 1e-15);
        assert!((tau - 1.969697).abs() < 1e-6);
    }

    #[test]
    fn moving_source_matches_bisection() {
        let traj = line_y(2.0);
        let x = Point3::new(10.0, 0.0, 0.0);
        let tau = retarded_time(x, &traj, 1.0, 330.0, RetardedSolveParams::default()).unwrap();
        let oracle = bisect_tau(x, &traj, 1.0, 330.0);
        assert!((tau - oracle).abs() < 1e-10);
        assert!((tau - 0.96955).abs() < 1e-5);
    }

    #[test]
    fn residual_below_tolerance() {
        let traj = crate::model::builtin_trajectory(crate::model::ScenarioId::CylSpiral);
        let x = Point3::new(7.0, 7.0, 1.0);
        for t in [0.5, 3.3, 12.0, 19.9] {
            let tau = retarded_time(x, &traj, t, 330.0, RetardedSolveParams::default()).unwrap();
            let residual = (tau - (t - x.distance(traj.position_clamped(tau)) / 330.0)).abs();
            assert!(residual < 1e-10);
        }
    }

    #[test]
    fn rejects_supersonic_paths() {
        let traj = line_y(2.0).with_v_max(400.0);
        let err = retarded_time(Point3::new(10.0, 0.0, 0.0), &traj, 1.0, 330.0, Default::default());
        assert!(err.is_err());
    }

    #[test]
    fn non_convergence_reported() {
        let traj = line_y(2.0);
        let params = RetardedSolveParams {
            tolerance: 1e-30,
            max_iterations: 3,
        };
        assert!(matches!(
            retarded_time(Point3::new(10.0, 0.0, 0.0), &traj, 1.0, 330.0, params),
            Err(Error::RetardedTimeDiverged { .. })
        ));
    }

    #[test]
    fn causality_before_first_arrival() {
        let traj = line_y(2.0);
        let sig = SourceSignal::new(1.0, 2.0).unwrap();
        let x = Point3::new(10.0, 0.0, 0.0);
        let first_arrival = 10.0 / 330.0;
        for t in [0.0, 0.01, first_arrival * 0.999] {
            let u = retarded_potential(x, t, &traj, 330.0, sig, PotentialMode::default()).unwrap();
            assert_eq!(u, 0.0);
        }
    }

    #[test]
    fn static_potential_value() {
        let origin = Trajectory::stationary(Point3::ORIGIN, 10.0).unwrap();
        let sig = SourceSignal::new(1.0, 10.0).unwrap();
        let x = Point3::new(10.0, 0.0, 0.0);
        let t = PI / 2.0 + 10.0 / 330.0;
        let u = retarded_potential(x, t, &origin, 330.0, sig, PotentialMode::default()).unwrap();
        let expected = 1.0 / (40.0 * PI);
        assert!(((u - expected) / expected).abs() < 1e-12);
        assert!((u - 7.9577e-3).abs() < 1e-7);
    }

    #[test]
    fn modes_agree_without_motion() {
        let origin = Trajectory::stationary(Point3::new(0.5, -1.0, 2.0), 10.0).unwrap();
        let sig = SourceSignal::new(1.0, 10.0).unwrap();
        for (i, t) in [0.3, 1.7, 4.4, 9.9].into_iter().enumerate() {
            let x = Point3::new(10.0, i as f64, -(i as f64));
            let a = retarded_potential(x, t, &origin, 330.0, sig, PotentialMode::NormalizedDirection).unwrap();
            let b = retarded_potential(x, t, &origin, 330.0, sig, PotentialMode::PaperLiteral).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn literal_mode_reports_pathological_denominator() {
        // 10 m separation with 40 m/s toward the receiver: 1 − 400/330 < 0
        let traj = Trajectory::sampled(
            "fast",
            vec![(0.0, Point3::new(-50.0, 0.0, 0.0)), (2.0, Point3::new(30.0, 0.0, 0.0))],
        )
        .unwrap();
        let sig = SourceSignal::new(1.0, 2.0).unwrap();
        let x = Point3::new(40.0, 0.0, 0.0);
        let res = retarded_potential(x, 1.5, &traj, 330.0, sig, PotentialMode::PaperLiteral);
        assert!(matches!(res, Err(Error::NonPositiveDenominator(_))));
        assert!(retarded_potential(x, 1.5, &traj, 330.0, sig, PotentialMode::NormalizedDirection).is_ok());
    }

    #[test]
    fn emission_stops_at_terminal_time() {
        let origin = Trajectory::stationary(Point3::ORIGIN, 1.0).unwrap();
        let sig = SourceSignal::new(1.0, 1.0).unwrap();
        let x = Point3::new(10.0, 0.0, 0.0);
        let u = retarded_potential(x, 1.0 + 11.0 / 330.0, &origin, 330.0, sig, PotentialMode::default()).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn approx_field_values() {
        let origin = Trajectory::stationary(Point3::ORIGIN, 10.0).unwrap();
        let x = Point3::new(0.0, 6.0, 8.0);
        assert!(approx_field(x, PI, &origin, 1.0).unwrap().abs() < 1e-17);
        let u = approx_field(x, PI / 2.0, &origin, 1.0).unwrap();
        assert!((u - 1.0 / (40.0 * PI)).abs() < 1e-15);
        assert!(matches!(approx_field(Point3::ORIGIN, 1.0, &origin, 1.0), Err(Error::CoincidentPoints)));
    }
}
