//! Experiment orchestration behind the `mobicond` command-line tool.

pub mod commands;
pub mod config;
pub mod oracle;
pub mod output;

pub use commands::{
    cmd_conductance, cmd_gap_sweep, cmd_oracle_check, cmd_oracle_check_with, cmd_ring, cmd_spread, cmd_tradeoff,
    fit_gap, reference_radius, run_command, GapFit, GapRow, Summary,
};
pub use config::{Command, CutChoice, ExperimentConfig};
pub use oracle::{run_oracle_checks, OracleCheck, OracleOptions, INVARIANTS};
pub use output::{fmt_float, RunDir, RunManifest};
