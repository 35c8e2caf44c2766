//! File formats: square-matrix CSV input, JSON analysis reports and DOT output.

mod dot;
mod industries;
mod matrix_csv;
mod report;

pub use dot::{emit_dot, emit_dot_named};
pub use industries::IndustryTable;
pub use matrix_csv::{parse_matrix_csv, read_matrix_csv, write_matrix_csv};
pub use report::{
    emit_report_json, parse_report_json, AnalysisReport, ClusterEntry, Metadata, OverlapEntry,
    OverlapReport, ReportContents,
};

use crate::graph::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowLengthMismatch {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: not a finite number: {cell:?}")]
    NonNumericCell {
        line: u64,
        column: usize,
        cell: String,
    },
    #[error("line {line}, column {column}: negative weight {value}")]
    NegativeWeight {
        line: u64,
        column: usize,
        value: f64,
    },
    #[error("line {line}: row label {found:?} does not match column label {expected:?}")]
    LabelMismatch {
        line: u64,
        expected: String,
        found: String,
    },
    #[error("expected {expected} data rows, found {found}")]
    RowCountMismatch { expected: usize, found: usize },
    #[error("influence report has {found} entries for a cluster of {expected} vertices")]
    ReportMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
