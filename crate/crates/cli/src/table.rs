//! Newline-delimited JSON knot tables.

use std::collections::HashSet;
use std::path::Path;

use khova_core::diagram::{parse_pd_code, KnotDiagram};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Prime knots through 8 crossings, with Jones values from an independent
/// Kauffman bracket state sum.
pub const BUNDLED_TABLE: &str = include_str!("../data/knots.ndjson");

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: record {name:?} has an invalid PD code: {message}")]
    InvalidPd { line: usize, name: String, message: String },
    #[error("line {line}: duplicate knot name {name:?}")]
    Duplicate { line: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotTableEntry {
    pub name: String,
    pub pd: String,
    #[serde(rename = "jones", default, skip_serializing_if = "Option::is_none")]
    pub expected_jones: Option<String>,
    /// Reference rational Khovanov polynomial, in `q` and `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_kh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_kh_f2: Option<String>,
}

impl KnotTableEntry {
    pub fn diagram(&self) -> Result<KnotDiagram, khova_core::diagram::DiagramError> {
        parse_pd_code(&self.pd)
    }
}

pub fn parse_knot_table(text: &str) -> Result<Vec<KnotTableEntry>, TableError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let entry: KnotTableEntry = serde_json::from_str(raw)
            .map_err(|e| TableError::Malformed { line, message: e.to_string() })?;
        if let Err(e) = entry.diagram() {
            return Err(TableError::InvalidPd { line, name: entry.name, message: e.to_string() });
        }
        if !seen.insert(entry.name.clone()) {
            return Err(TableError::Duplicate { line, name: entry.name });
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn load_knot_table(path: impl AsRef<Path>) -> Result<Vec<KnotTableEntry>, TableError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| TableError::Io { path: path.display().to_string(), source })?;
    parse_knot_table(&text)
}

pub fn bundled_table() -> Vec<KnotTableEntry> {
    parse_knot_table(BUNDLED_TABLE).expect("bundled table is valid")
}
