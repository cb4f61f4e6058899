use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

use super::schedule::TuningSchedule;

/// Indicator values below this are reported as low-confidence steps. The
/// functional is flat along the receiver direction: a correct noiseless
/// reconstruction scores above 0.9999 while points metres away still score
/// around 0.99, so only the last digits carry the signal.
pub const LOW_INDICATOR: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Global,
    Sequential,
    Parallel,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Global, Method::Sequential, Method::Parallel];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Global => "global",
            Method::Sequential => "sequential",
            Method::Parallel => "parallel",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?} (expected global, sequential or parallel)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconPoint {
    /// 1-based time index.
    pub j: usize,
    pub t: f64,
    pub z: Point3,
    pub indicator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconResult {
    pub method: Method,
    /// Reconstructed points ordered by time index. Skipped steps are absent.
    pub points: Vec<ReconPoint>,
    /// Steps whose column carried no usable signal.
    pub skipped: Vec<usize>,
    /// Steps the parallel schedule never visited, filled afterwards from the
    /// nearest visited neighbour.
    pub filled: Vec<usize>,
    pub schedule: Option<TuningSchedule>,
    /// Speed bound used by the tuned searches, m/s.
    pub v_max: Option<f64>,
}

impl ReconResult {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn positions(&self) -> Vec<Point3> {
        self.points.iter().map(|p| p.z).collect()
    }

    pub fn point_at(&self, j: usize) -> Option<&ReconPoint> {
        self.points
            .binary_search_by_key(&j, |p| p.j)
            .ok()
            .map(|i| &self.points[i])
    }

    /// Steps whose maximal indicator value dropped below `threshold`.
    pub fn low_confidence(&self, threshold: f64) -> Vec<usize> {
        self.points.iter().filter(|p| p.indicator < threshold).map(|p| p.j).collect()
    }

    /// Point sequence with the time axis reversed, as produced by a
    /// time-reversed record.
    pub fn reversed(&self, n_steps: usize, terminal: f64) -> Self {
        let dt = terminal / n_steps as f64;
        let mut points: Vec<ReconPoint> = self
            .points
            .iter()
            .map(|p| {
                let j = n_steps + 1 - p.j;
                ReconPoint { j, t: j as f64 * dt, ..*p }
            })
            .collect();
        points.reverse();
        Self {
            points,
            skipped: self.skipped.iter().rev().map(|j| n_steps + 1 - j).collect(),
            filled: self.filled.iter().rev().map(|j| n_steps + 1 - j).collect(),
            schedule: None,
            ..self.clone()
        }
    }
}
