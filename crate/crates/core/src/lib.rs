//! Simulation of the wave field radiated by a moving point emitter and
//! reconstruction of its trajectory from limited-aperture receiver data.
//!
//! The crate is organised along the processing chain:
//!
//! * [`model`]: trajectories, receiver patches, media, sampling meshes and
//!   wave records;
//! * [`forward`]: retarded-potential synthesis in a homogeneous background,
//!   the static-kernel approximation and the multiplicative noise model;
//! * [`scatter`]: frequency-domain volume-integral solver for a body
//!   inclusion;
//! * [`imaging`]: the normalized correlation indicator and the global,
//!   sequential and parallel argmax searches;
//! * [`postprocess`]: truncated Fourier smoothing, gap segmentation and
//!   error metrics;
//! * [`experiment`]: configured end-to-end runs with persisted artifacts;
//! * [`demo`]: the line-delimited JSON session service for live strokes.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Segment lists are vectors of ranges by design, even with one segment.
#![allow(clippy::single_range_in_vec_init)]

pub mod demo;
pub mod error;
pub mod experiment;
pub mod forward;
pub mod geometry;
pub mod imaging;
pub mod io;
pub mod model;
pub mod postprocess;
pub mod scatter;

pub use error::{Error, Result};
pub use geometry::Point3;
