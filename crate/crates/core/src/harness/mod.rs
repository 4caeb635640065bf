//! Configuration, the run driver, artifact writers and sweeps.

mod config;
mod output;
mod run;
mod sweep;

pub use config::{parse_config, ConfigError, Geometry, InitU, InitV, RunConfig};
pub use output::{
    convergence_table, emit_summary, emit_timeseries, fmt_f64, refined, summary_json,
    timeseries_csv, ConvergenceRow, Residuals, Summary, TIMESERIES_HEADER,
};
pub use run::{
    classify, detect_blowup, drive, DiagnosticRow, MomentGap, Outcome, RunRecord, Termination,
};
pub use sweep::{index_csv, numbered, run_dir, sweep, SweepEntry, INDEX_HEADER};
