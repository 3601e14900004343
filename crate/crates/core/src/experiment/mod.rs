//! Reproducible experiment harness: config files, sweeps and reports.

mod config;
mod report;
mod run;

pub use config::{ExperimentConfig, ExperimentKind, NetworkSpec, DEFAULT_EDGE_PROBABILITY, DEFAULT_TRIALS};
pub use report::{emit_report, fit_power_law, render_report, Cell, Format, PowerFit, Report, Row};
pub use run::{
    er_percolation_graph, run, run_custom, run_fig1, run_fig2, run_fig3, run_percolation_er, FIG1_COLUMNS,
    FIG2_COLUMNS, FIG3_COLUMNS, PERCOLATION_COLUMNS,
};
