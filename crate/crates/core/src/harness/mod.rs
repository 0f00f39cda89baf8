//! Configuration, persistence and the run driver behind the command-line tool.

mod config;
mod records;
mod run;
mod snapshot;

pub use config::{parse_config, serialize_config, ConfigBuilder, LifespanSystem, Mode, RunConfig};
pub use records::{
    fmt_f64, primitive_diagnostics, qh_diagnostics, write_csv, write_table, DiagnosticsRecord, DIAGNOSTICS_HEADER,
};
pub use run::{config_hash, run, Outcome, RunSummary};
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, Snapshot};
