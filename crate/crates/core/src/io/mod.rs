//! Persistence and configuration: binary field snapshots, CSV tables with
//! fixed schemas, JSON summaries, key=value run configuration and the
//! model and initial-data strings of the command line.

mod config;
mod snapshot;
mod table;

pub use config::{
    output_dir, output_path, parse_f64_list, parse_init, parse_key_values, parse_model, parse_pair, InitSpec, Params,
    OUT_DIR_ENV,
};
pub use snapshot::{GridKind, Snapshot, MAGIC};
pub use table::{
    num, to_json_string, write_json, Table, APPENDIX_COLUMNS, CLASSIFY_COLUMNS, DIAGNOSTICS_COLUMNS,
    DICHOTOMY_COLUMNS, EQUIVALENCE_COLUMNS, KGAP_COLUMNS, KTABLE_COLUMNS, LANDSCAPE_COLUMNS, RECORD_COLUMNS, SCHEMAS,
};
