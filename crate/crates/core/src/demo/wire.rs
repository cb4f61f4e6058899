use serde::{Deserialize, Serialize};

use crate::io::segment_coeffs;
use crate::postprocess::{FourierCurve, SegmentSet};

use super::session::{SessionConfig, StepOutcome};

/// One line of the session protocol. Clients send `config`, `stroke_point`
/// and `finalize`; the service answers with the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WireMessage {
    Config(SessionConfig),
    StrokePoint { t: f64, u: f64, v: f64 },
    Finalize,
    ReconPoint { t: f64, x1: f64, x2: f64, x3: f64, indicator: f64 },
    Skip { t: f64, reason: String },
    Segment { ranges: Vec<[usize; 2]> },
    Smooth { segment: usize, coeffs: FourierCurve },
    Error { phase: String, message: String },
}

impl WireMessage {
    pub fn error(phase: &str, message: impl ToString) -> Self {
        WireMessage::Error {
            phase: phase.into(),
            message: message.to_string(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("wire messages always serialize")
    }

    pub fn from_line(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }
}

impl From<StepOutcome> for WireMessage {
    fn from(outcome: StepOutcome) -> Self {
        match outcome {
            StepOutcome::Point(p) => WireMessage::ReconPoint {
                t: p.t,
                x1: p.z.x1,
                x2: p.z.x2,
                x3: p.z.x3,
                indicator: p.indicator,
            },
            StepOutcome::Skipped { t, reason, .. } => WireMessage::Skip { t, reason },
        }
    }
}

/// `segment` followed by one `smooth` message per segment.
pub fn segment_messages(segments: &SegmentSet) -> Vec<WireMessage> {
    let ranges = segments.ranges.iter().map(|r| [r.start, r.end]).collect();
    std::iter::once(WireMessage::Segment { ranges })
        .chain(segment_coeffs(segments).into_iter().map(|c| WireMessage::Smooth {
            segment: c.segment,
            coeffs: c.curve,
        }))
        .collect()
}
