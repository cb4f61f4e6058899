//! Domain types shared by the forward solvers, the imaging searches and the
//! post-processing stages.

mod builtin;
mod hello;
mod medium;
mod mesh;
mod receivers;
mod record;
mod time_grid;
mod trajectory;

pub use builtin::{builtin_trajectory, ScenarioId};
pub use hello::{hello_trajectory, HelloParams};
pub use medium::{Cuboid, Inclusion, MediumSpec};
pub use mesh::SamplingMesh;
pub use receivers::{make_receiver_array, PatchSpec, ReceiverArray};
pub use record::{ForwardKind, RecordMeta, WaveRecord};
pub use time_grid::TimeGrid;
pub use trajectory::{Path, Polyline, Trajectory, VMAX_SAFETY};
