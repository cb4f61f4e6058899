//! The five-letter "HELLO" path: letters drawn at a slow stroke speed in the
//! `x1 = 0` plane, joined by fast diagonal connectors.

use serde::{Deserialize, Serialize};

use super::trajectory::{Polyline, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::Point3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelloParams {
    pub terminal: f64,
    /// Speed along letter strokes, m/s.
    pub stroke_speed: f64,
    /// Speed along the connectors between letters, m/s.
    pub connector_speed: f64,
    /// Letter height along x3, m.
    pub height: f64,
    /// Horizontal spacing between consecutive letters, m.
    pub gap: f64,
    /// Sampling step the connectors are scheduled against, s.
    pub sample_dt: f64,
    /// Connector midpoints sit at this offset past a sampling instant, s.
    pub connector_phase: f64,
}

impl Default for HelloParams {
    fn default() -> Self {
        Self {
            terminal: 8.0,
            stroke_speed: 8.0,
            connector_speed: 80.0,
            height: 5.0,
            gap: 1.0,
            sample_dt: 0.1,
            connector_phase: 0.0175,
        }
    }
}

#[derive(Clone, Copy)]
enum Letter {
    H,
    E,
    L,
    O,
}

impl Letter {
    /// Stroke length is `h_coef * height + w_coef * width`.
    fn coefficients(self) -> (f64, f64) {
        match self {
            Letter::H => (3.0, 1.0),
            Letter::E => (1.0, 5.0),
            Letter::L => (1.0, 1.0),
            Letter::O => (2.0, 2.0),
        }
    }

    /// Corner points in (x2, x3), starting top-left.
    fn corners(self, left: f64, width: f64, height: f64) -> Vec<(f64, f64)> {
        let (l, r) = (left, left + width);
        let (top, mid, bot) = (height / 2.0, 0.0, -height / 2.0);
        match self {
            Letter::H => vec![(l, top), (l, bot), (l, mid), (r, mid), (r, top), (r, bot)],
            Letter::E => vec![
                (l, top),
                (r, top),
                (l, top),
                (l, mid),
                (r, mid),
                (l, mid),
                (l, bot),
                (r, bot),
            ],
            Letter::L => vec![(l, top), (l, bot), (r, bot)],
            Letter::O => vec![(l, top), (l, bot), (r, bot), (r, top), (l, top)],
        }
    }
}

const WORD: [Letter; 5] = [Letter::H, Letter::E, Letter::L, Letter::L, Letter::O];

/// Builds the HELLO polyline.
///
/// Letter widths are chosen so that the whole motion lasts exactly
/// `terminal` seconds and every connector is traversed between two
/// sampling instants, centred `connector_phase` after one of them.
pub fn hello_trajectory(params: &HelloParams) -> Result<Trajectory> {
    let HelloParams {
        terminal,
        stroke_speed,
        connector_speed,
        height,
        gap,
        sample_dt,
        connector_phase,
    } = *params;
    if !(stroke_speed > 0.0 && connector_speed > 0.0 && height > 0.0 && gap > 0.0 && sample_dt > 0.0)
    {
        return Err(Error::invalid("HELLO parameters must be positive"));
    }
    let connector_len = gap.hypot(height);
    let connector_time = connector_len / connector_speed;
    let nominal_width = 0.44 * height;

    let mut widths = Vec::with_capacity(WORD.len());
    let mut clock = 0.0;
    for (k, letter) in WORD.iter().enumerate() {
        let (hc, wc) = letter.coefficients();
        let duration = if k + 1 < WORD.len() {
            let nominal = (hc * height + wc * nominal_width) / stroke_speed;
            let mid = clock + nominal + connector_time / 2.0;
            let target = ((mid - connector_phase) / sample_dt).round() * sample_dt + connector_phase;
            nominal + (target - mid)
        } else {
            terminal - clock
        };
        let width = (duration * stroke_speed - hc * height) / wc;
        if !(width > 0.1 * height) {
            return Err(Error::invalid(format!(
                "HELLO letter {k} would have width {width:.3} m; terminal time too short"
            )));
        }
        widths.push(width);
        clock += duration + connector_time;
    }

    let span: f64 = widths.iter().sum::<f64>() + gap * (WORD.len() - 1) as f64;
    let mut left = -span / 2.0;
    let mut knots: Vec<(f64, Point3)> = Vec::new();
    let mut t = 0.0;
    for (letter, &width) in WORD.iter().zip(&widths) {
        let corners = letter.corners(left, width, height);
        let mut prev: Option<(f64, f64)> = None;
        for (x2, x3) in corners {
            if let Some((px, pz)) = prev {
                t += (x2 - px).hypot(x3 - pz) / stroke_speed;
            } else if let Some(&(_, last)) = knots.last() {
                t += last.distance(Point3::new(0.0, x2, x3)) / connector_speed;
            }
            knots.push((t, Point3::new(0.0, x2, x3)));
            prev = Some((x2, x3));
        }
        left += width + gap;
    }
    // absorb round-off so the motion ends exactly at the terminal time
    if let Some(last) = knots.last_mut() {
        last.0 = terminal;
    }
    let line = Polyline::new(knots)?;
    Ok(Trajectory::from_polyline("hello", line).with_sampled_v_max())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duration_and_speeds() {
        let traj = hello_trajectory(&HelloParams::default()).unwrap();
        assert_eq!(traj.terminal(), 8.0);
        let knots = match traj.path() {
            crate::model::Path::Polyline(l) => l.knots().to_vec(),
            _ => unreachable!(),
        };
        let mut slow = 0;
        let mut fast = 0;
        for w in knots.windows(2) {
            let v = w[0].1.distance(w[1].1) / (w[1].0 - w[0].0);
            if (v - 8.0).abs() < 1e-6 {
                slow += 1;
            } else if (v - 80.0).abs() < 1e-6 {
                fast += 1;
            } else {
                panic!("unexpected speed {v}");
            }
        }
        assert_eq!(fast, 4);
        assert!(slow > 10);
        assert!((traj.v_max() - 80.0 * 1.01).abs() < 1e-6);
    }

    #[test]
    fn connectors_fall_between_retarded_sampling_instants() {
        // at the default patch the propagation delay from the writing plane to
        // the receivers ranges over roughly 15..50 ms, so a connector
        // confined to (t_n - 15 ms, t_n + 50 ms) is never seen by a sample
        let p = HelloParams::default();
        let traj = hello_trajectory(&p).unwrap();
        let knots = match traj.path() {
            crate::model::Path::Polyline(l) => l.knots().to_vec(),
            _ => unreachable!(),
        };
        let mut connectors = 0;
        for w in knots.windows(2) {
            let v = w[0].1.distance(w[1].1) / (w[1].0 - w[0].0);
            if v > 50.0 {
                connectors += 1;
                let n = (w[0].0 / p.sample_dt).round();
                let t_n = n * p.sample_dt;
                assert!(w[0].0 > t_n - 0.015 && w[1].0 < t_n + 0.05, "{:?}", (w[0].0, w[1].0));
            }
        }
        assert_eq!(connectors, 4);
    }

    #[test]
    fn stays_inside_sampling_cube() {
        let traj = hello_trajectory(&HelloParams::default()).unwrap();
        for i in 0..=8000 {
            let p = traj.position_clamped(i as f64 * 1e-3);
            assert!(p.x2.abs() <= 8.0 && p.x3.abs() <= 8.0);
        }
    }
}
