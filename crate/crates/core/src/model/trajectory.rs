use serde::{Deserialize, Serialize};

use super::builtin::Analytic;
use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Safety factor applied to the densely sampled speed supremum of built-ins.
pub const VMAX_SAFETY: f64 = 1.01;

const VMAX_SAMPLES: usize = 10_000;

/// Ordered `(t, position)` knots joined by straight segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    knots: Vec<(f64, Point3)>,
}

impl Polyline {
    pub fn new(knots: Vec<(f64, Point3)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::invalid("polyline needs at least one knot"));
        }
        for (t, p) in &knots {
            if !t.is_finite() || !p.is_finite() {
                return Err(Error::invalid("polyline knots must be finite"));
            }
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("polyline times must be strictly increasing"));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, Point3)] {
        &self.knots
    }

    pub fn start_time(&self) -> f64 {
        self.knots[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    /// Appends a knot after the current end.
    pub fn push(&mut self, t: f64, p: Point3) -> Result<()> {
        if !(t > self.end_time()) || !p.is_finite() {
            return Err(Error::invalid(format!(
                "knot time {t} must exceed the last knot time {}",
                self.end_time()
            )));
        }
        self.knots.push((t, p));
        Ok(())
    }

    fn segment_speed(&self, k: usize) -> f64 {
        let (ta, pa) = self.knots[k];
        let (tb, pb) = self.knots[k + 1];
        pa.distance(pb) / (tb - ta)
    }

    pub fn max_speed(&self) -> f64 {
        (0..self.knots.len().saturating_sub(1))
            .map(|k| self.segment_speed(k))
            .fold(0.0, f64::max)
    }

    /// Position and right-hand velocity; `t` is clamped to the knot span.
    fn state(&self, t: f64) -> (Point3, Point3) {
        let n = self.knots.len();
        if n == 1 {
            return (self.knots[0].1, Point3::ORIGIN);
        }
        if t <= self.start_time() {
            let (ta, pa) = self.knots[0];
            let (tb, pb) = self.knots[1];
            return (pa, (pb - pa) / (tb - ta));
        }
        // last segment k with t_k <= t (right-hand convention at knots)
        let k = match self.knots.partition_point(|(tk, _)| *tk <= t) {
            0 => 0,
            i => (i - 1).min(n - 2),
        };
        let (ta, pa) = self.knots[k];
        let (tb, pb) = self.knots[k + 1];
        let vel = (pb - pa) / (tb - ta);
        if t >= tb {
            return (pb, vel);
        }
        let s = (t - ta) / (tb - ta);
        (pa.lerp(pb, s), vel)
    }
}

/// Geometric description of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Path {
    Stationary(Point3),
    Analytic(Analytic),
    Polyline(Polyline),
}

/// A moving emitter path on the time domain `(start, terminal]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    id: String,
    path: Path,
    start: f64,
    terminal: f64,
    v_max: f64,
}

impl Trajectory {
    pub fn stationary(p: Point3, terminal: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::invalid("stationary point must be finite"));
        }
        if !(terminal > 0.0) {
            return Err(Error::invalid("terminal time must be positive"));
        }
        Ok(Self {
            id: "stationary".into(),
            path: Path::Stationary(p),
            start: 0.0,
            terminal,
            v_max: 0.0,
        })
    }

    /// Piecewise-linear path through `knots`; `v_max` is the largest segment speed.
    pub fn sampled(id: impl Into<String>, knots: Vec<(f64, Point3)>) -> Result<Self> {
        let line = Polyline::new(knots)?;
        Ok(Self::from_polyline(id, line))
    }

    pub fn from_polyline(id: impl Into<String>, line: Polyline) -> Self {
        let start = line.start_time();
        let terminal = line.end_time();
        let v_max = line.max_speed();
        Self {
            id: id.into(),
            path: Path::Polyline(line),
            start,
            terminal,
            v_max,
        }
    }

    pub(crate) fn analytic(id: &str, shape: Analytic, terminal: f64) -> Self {
        let mut traj = Self {
            id: id.into(),
            path: Path::Analytic(shape),
            start: 0.0,
            terminal,
            v_max: 0.0,
        };
        traj.v_max = traj.sampled_speed_sup() * VMAX_SAFETY;
        traj
    }

    /// Overrides the declared speed bound.
    pub fn with_v_max(mut self, v_max: f64) -> Self {
        self.v_max = v_max;
        self
    }

    pub(crate) fn with_sampled_v_max(mut self) -> Self {
        self.v_max = self.sampled_speed_sup() * VMAX_SAFETY;
        self
    }

    fn sampled_speed_sup(&self) -> f64 {
        let span = self.terminal - self.start;
        (1..=VMAX_SAMPLES)
            .map(|i| {
                let t = self.start + span * i as f64 / VMAX_SAMPLES as f64;
                self.state_clamped(t).1.norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    /// Position and velocity at `t` in `(start, terminal]`.
    ///
    /// At instants where the path is not differentiable the right-hand
    /// velocity is returned (left-hand at the terminal time).
    pub fn eval(&self, t: f64) -> Result<(Point3, Point3)> {
        // polylines recorded from t > 0 include their first knot
        let first_knot = matches!(self.path, Path::Polyline(_)) && t == self.start && t > 0.0;
        let inside = t <= self.terminal && (t > self.start || first_knot);
        if !inside || !t.is_finite() {
            return Err(Error::OutsideDomain {
                t,
                terminal: self.terminal,
            });
        }
        Ok(self.state_clamped(t))
    }

    pub fn position(&self, t: f64) -> Result<Point3> {
        self.eval(t).map(|s| s.0)
    }

    /// Position and velocity with `t` clamped to `[start, terminal]`: the
    /// emitter rests at its start point before the motion and at its final
    /// point afterwards.
    pub fn state_clamped(&self, t: f64) -> (Point3, Point3) {
        if t < self.start {
            return (self.state_clamped(self.start).0, Point3::ORIGIN);
        }
        let t = t.min(self.terminal);
        match &self.path {
            Path::Stationary(p) => (*p, Point3::ORIGIN),
            Path::Analytic(shape) => shape.state(t),
            Path::Polyline(line) => line.state(t),
        }
    }

    pub fn position_clamped(&self, t: f64) -> Point3 {
        self.state_clamped(t).0
    }

    /// CSV rows `t,x1,x2,x3` at the given instants.
    pub fn to_csv(&self, times: &[f64]) -> String {
        let mut out = String::from("t,x1,x2,x3\n");
        for &t in times {
            let p = self.position_clamped(t);
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", t, p.x1, p.x2, p.x3));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_path_has_zero_velocity() {
        let p = Point3::new(1.0, -2.0, 0.5);
        let traj = Trajectory::stationary(p, 3.0).unwrap();
        assert_eq!(traj.eval(1.7).unwrap(), (p, Point3::ORIGIN));
        assert_eq!(traj.v_max(), 0.0);
    }

    #[test]
    fn sampled_linear_interpolation() {
        let traj = Trajectory::sampled(
            "seg",
            vec![(1.0, Point3::ORIGIN), (2.0, Point3::new(0.0, 1.0, 0.0))],
        )
        .unwrap();
        let (p, v) = traj.eval(1.5).unwrap();
        assert_eq!(p, Point3::new(0.0, 0.5, 0.0));
        assert_eq!(v, Point3::new(0.0, 1.0, 0.0));
        assert!(traj.eval(2.5).is_err());
        assert!(traj.eval(0.5).is_err());
    }

    #[test]
    fn polyline_right_hand_velocity_at_knot() {
        let traj = Trajectory::sampled(
            "corner",
            vec![
                (0.0, Point3::ORIGIN),
                (1.0, Point3::new(1.0, 0.0, 0.0)),
                (2.0, Point3::new(1.0, 2.0, 0.0)),
            ],
        )
        .unwrap();
        let (p, v) = traj.eval(1.0).unwrap();
        assert_eq!(p, Point3::new(1.0, 0.0, 0.0));
        assert_eq!(v, Point3::new(0.0, 2.0, 0.0));
        // terminal instant keeps the last segment's slope
        assert_eq!(traj.eval(2.0).unwrap().1, Point3::new(0.0, 2.0, 0.0));
        assert_eq!(traj.v_max(), 2.0);
        assert!(traj.eval(0.0).is_err());
    }

    #[test]
    fn clamping_outside_domain() {
        let traj = Trajectory::sampled(
            "seg",
            vec![(0.0, Point3::ORIGIN), (2.0, Point3::new(0.0, 2.0, 0.0))],
        )
        .unwrap();
        assert_eq!(traj.position_clamped(-1.0), Point3::ORIGIN);
        assert_eq!(traj.position_clamped(5.0), Point3::new(0.0, 2.0, 0.0));
    }

    #[test]
    fn polyline_rejects_unsorted() {
        assert!(Polyline::new(vec![(1.0, Point3::ORIGIN), (1.0, Point3::ORIGIN)]).is_err());
        let mut line = Polyline::new(vec![(0.0, Point3::ORIGIN)]).unwrap();
        assert!(line.push(0.0, Point3::ORIGIN).is_err());
        line.push(0.5, Point3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(line.max_speed(), 2.0);
    }
}
