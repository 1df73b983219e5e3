//! Library side of the `khova` command: knot tables, the per-diagram
//! pipeline, reports and their renderings.

pub mod pipeline;
pub mod render;
pub mod table;

pub use pipeline::{analyze, batch_verify, verify_entry, DiagramReport, Expected, Options, RunReport, Which};
pub use table::{bundled_table, load_knot_table, parse_knot_table, KnotTableEntry, TableError};
