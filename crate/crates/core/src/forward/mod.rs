//! Field radiated by the moving emitter in the homogeneous background.

mod noise;
mod retarded;
mod synth;

pub use noise::{add_noise, cell_uniform, noise_factor};
pub use retarded::{
    approx_field, retarded_potential, retarded_time, retarded_time_trace, PotentialMode,
    RetardedSolveParams, SourceSignal,
};
pub use synth::{synthesize_approx_record, synthesize_column, synthesize_record};
