//! Experiment plumbing: configs, replicated runs, reports, trace files and
//! figures.

pub mod config;
pub mod metrics;
pub mod plot;
pub mod run;
pub mod suite;
pub mod traces;

pub use config::ExperimentConfig;
pub use metrics::{emit_table, MetricsReport, MetricsRow, SeedLabel};
pub use plot::{emit_plots, render_figure};
pub use run::{run_experiment, write_outputs, ExperimentOutput, RunOptions, TracePolicy};
pub use suite::{run_suite, write_suite_outputs, Suite, SuiteSettings};
pub use traces::{read_trace, write_trace, LabeledTrace};
