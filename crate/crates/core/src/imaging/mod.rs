//! Trajectory recovery by maximizing the normalized correlation between the
//! measured receiver column and the static point-source test function.

mod correlator;
mod parallel;
mod result;
mod schedule;
pub(crate) mod search;

pub use correlator::{indicator, test_function, Correlator, IndicatorParams, DEFAULT_EXCLUSION_RADIUS};
pub use parallel::reconstruct_parallel;
pub use result::{Method, ReconPoint, ReconResult, LOW_INDICATOR};
pub use schedule::{parallel_schedule, ScheduleEntry, TuningSchedule};
pub use search::{grid_argmax, lattice_slack, reconstruct_global, reconstruct_sequential};

use crate::error::Result;
use crate::model::{SamplingMesh, WaveRecord};

/// Runs the chosen search. `v_max` is ignored by the global method.
pub fn reconstruct(record: &WaveRecord, mesh: &SamplingMesh, method: Method, v_max: f64, params: &IndicatorParams) -> Result<ReconResult> {
    match method {
        Method::Global => reconstruct_global(record, mesh, params),
        Method::Sequential => reconstruct_sequential(record, mesh, v_max, params),
        Method::Parallel => reconstruct_parallel(record, mesh, v_max, params),
    }
}
