//! Seeded Monte-Carlo trials, sweeps over the vertex count with a log-log
//! slope fit, and the clustering-objective consistency experiment.

mod consistency;
mod output;
mod sweep;
mod trial;

pub use consistency::{
    consistency_experiment, paired_seed, ConsistencyOptions, ConsistencyReport, ConsistencyRow,
};
pub use output::{
    consistency_csv, record_row, records_csv, records_header, summary_json, timings_csv,
    RECORD_COLUMNS,
};
pub use sweep::{
    fit_line, summarize, sweep, trial_seed, PerNSummary, SlopeFit, SweepOutput, SweepSummary,
    DEFAULT_N_GRID, DEFAULT_TRIALS,
};
pub use trial::{
    run_trial, run_trial_detailed, StageTimings, TrialArtifacts, TrialConfig, TrialRecord,
    TrialRunner, DEFAULT_ETA,
};
