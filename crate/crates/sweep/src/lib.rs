//! Flux sweeps, output files and the `coupler` command line on top of
//! `coupler-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use cli::cli_main;
pub use config::{parse_flux, CouplingPath, SweepConfig};
pub use error::{Result, SweepError};
pub use output::{emit_csv, emit_plot_script, parse_csv, write_csv};
pub use sweep::{evaluate_point, run_sweep, SweepOutcome, SweepRow};
