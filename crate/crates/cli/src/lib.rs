//! Config parsing, presets and report output for the `dris` runner.

pub mod config;
pub mod manifest;
pub mod output;

pub use config::{parse_config_file, parse_config_str, preset, render_config, ConfigError};
pub use manifest::RunManifest;
pub use output::{emit_csv, emit_plot_data, parse_plot_data, write_csv, OutputError, PlotSeries};

use dris_core::simulate::{run_sweep, SweepConfig, SweepReport};

/// Runs a sweep, on a dedicated pool when `threads` is given.
pub fn run_with_threads(config: &SweepConfig, threads: Option<usize>) -> anyhow::Result<SweepReport> {
    match threads {
        None => Ok(run_sweep(config)?),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(|| run_sweep(config))?)
        }
    }
}
