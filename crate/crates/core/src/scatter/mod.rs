//! Point source next to a penetrable body: the frequency-domain total field
//! from the volume integral equation `û = Φ(·, z0) + K û`, solved by Neumann
//! iteration on a voxelization of the body, and the time-domain record built
//! from it.

mod kernel;
mod operator;
mod synth;
mod voxel;

pub use kernel::{ball_self_integral, check_smallness, helmholtz_fundamental};
pub use operator::{eval_total_field, solve_lippmann_schwinger, HelmholtzSolution, LsOperator};
pub use synth::{synthesize_record_inhomogeneous, DEFAULT_VOXELS};
pub use voxel::VoxelGrid;

/// Default relative tolerance of the Neumann iteration.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
