//! Trials, sweeps, result files and the command line.

pub mod cli;
mod config;
mod output;
mod sweep;
mod trial;

pub use config::{CRule, SweepConfig, SweepMode};
pub use output::{
    fit_table, write_cells_csv, write_diagnostics_csv, write_fits_csv, write_plot_data, write_runtime_csv,
    write_sweep_outputs, write_timings_csv, write_trials_csv, CELLS_HEADER, FITS_HEADER, TRIALS_HEADER,
};
pub use sweep::{
    fit_series, run_sweep, summarize, sweep_cells, CellSummary, SeriesFit, SweepResult, MAX_DROP_FRACTION,
    REFERENCE_RUNTIME_SCALE, REFERENCE_SLOPE,
};
pub use trial::{
    evaluate_pair, replay, run_trial, run_trial_full, sample_simplex, Cell, Timings, TrialArtifacts, TrialRecord,
};
