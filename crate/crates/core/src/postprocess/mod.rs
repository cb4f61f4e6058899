//! Smoothing of reconstructed point sequences by truncated Fourier series,
//! with gap detection for texts written as several separate strokes.

mod fourier;
mod metrics;
mod segment;

pub use fourier::{fourier_fit, FourierCurve};
pub use metrics::{hausdorff, trajectory_error, ErrorMetrics};
pub use segment::{fill_skipped, segment_gaps, smooth, SegmentSet, DEFAULT_GAP_FACTOR, DEFAULT_ORDER};
