//! Manifest loading, experiment execution, result persistence and
//! plot-table emission for the `qrp` command.

pub mod error;
pub mod generate;
pub mod manifest;
pub mod plot;
pub mod runner;

pub use error::{CliError, Result, EXIT_CONFIG, EXIT_RUNTIME};
pub use manifest::{ExperimentConfig, ExperimentKind, ExperimentManifest, Overrides};
pub use plot::{emit_plot_data, plot_table, PlotKind};
pub use runner::{execute, run, write_artifacts, ResultsDocument};

/// Caps the worker pool from `QRP_THREADS` (unset or 0 leaves the default).
/// Returns the thread count in effect.
pub fn configure_threads() -> Result<usize> {
    let requested = match std::env::var("QRP_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::config("", format!("QRP_THREADS={v:?} is not a thread count")))?,
        Err(_) => 0,
    };
    if requested > 0 {
        // Fails only when the pool already exists, in which case it stays as is.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(requested).build_global();
    }
    Ok(rayon::current_num_threads())
}
