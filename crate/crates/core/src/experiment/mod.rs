//! Configured end-to-end experiments: synthesis, noise, reconstruction,
//! smoothing, metrics and persisted artifacts.

mod config;
mod media;
mod pipeline;
mod plot;

pub use config::{ExperimentConfig, MediumCase, CONFIG_KEYS, PRESETS};
pub use media::{compare_media, paper_probes, MediaComparison, ProbeSeries};
pub use pipeline::{
    execute, postprocess_points, run_experiment, simulate, ExperimentReport, Outcome, RegressionCheck, WITHIN_TWO_CELLS_MIN,
};
pub use plot::{export_plot_data, PlotData};
