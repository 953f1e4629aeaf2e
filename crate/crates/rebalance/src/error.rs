//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column}: cannot parse {found:?} as a finite number")]
    Parse {
        row: usize,
        column: String,
        found: String,
    },

    #[error("row {row}, column {column}: value is not finite")]
    NonFinite { row: usize, column: String },

    #[error("dataset has no data rows")]
    EmptyDataset,

    #[error("label column {name:?} not found in header")]
    MissingLabelColumn { name: String },

    #[error("label column index {index} out of range for {width} columns")]
    LabelIndexOutOfRange { index: usize, width: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("duplicate row id {0}")]
    DuplicateRowId(u64),

    #[error("label {0} not present in dataset")]
    UnknownLabel(u32),

    #[error("dataset contains a single class; nothing to balance")]
    SingleClass,

    #[error("class {label} has {count} rows, fewer than {n_folds} folds")]
    ClassTooSmall {
        label: u32,
        count: usize,
        n_folds: usize,
    },

    #[error("{sampler}: seed selection left no usable examples")]
    EmptySeedSet { sampler: &'static str },

    #[error("reference set has {available} rows; at least 2 are required for neighbor queries")]
    InsufficientNeighbors { available: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
