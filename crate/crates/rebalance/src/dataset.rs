//! Dense in-memory dataset with CSV ingest and emit.
//!
//! A [`Dataset`] stores an `n x d` feature matrix of finite `f64` values
//! in row-major order, one dense label per row, and one stable `row_id`
//! per row. Labels found in a CSV file are re-encoded to `0..C-1`; the
//! original tokens are retained so emitted files carry the caller's
//! label vocabulary. Row ids survive filtering and unions, which lets
//! downstream code trace any synthetic row back to its seed rows.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// How to locate the label column in a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Header name. Requires a header row.
    Name(String),
    /// Zero-based column index.
    Index(usize),
}

/// Per-class row count, reported in ascending label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSummary {
    pub label: u32,
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<f64>,
    n_cols: usize,
    labels: Vec<u32>,
    row_ids: Vec<u64>,
    n_classes: u32,
    feature_names: Option<Vec<String>>,
    label_names: Option<Vec<String>>,
    label_col_name: String,
}

impl Dataset {
    /// Builds a dataset from a row-major feature matrix and dense labels.
    /// Row ids are assigned `0..n`.
    pub fn from_parts(features: Vec<f64>, n_cols: usize, labels: Vec<u32>) -> Result<Self> {
        if n_cols == 0 {
            return Err(Error::ShapeMismatch("datasets need at least one feature".into()));
        }
        if features.len() != labels.len() * n_cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not fill {} rows of {} columns",
                features.len(),
                labels.len(),
                n_cols
            )));
        }
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (i, v) in features.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i / n_cols + 1,
                    column: (i % n_cols + 1).to_string(),
                });
            }
        }
        let n_classes = labels.iter().copied().max().unwrap() + 1;
        let row_ids = (0..labels.len() as u64).collect();
        Ok(Self {
            features,
            n_cols,
            labels,
            row_ids,
            n_classes,
            feature_names: None,
            label_names: None,
            label_col_name: "label".into(),
        })
    }

    /// Builds a bare dataset with explicit row ids and class space. Callers
    /// guarantee shape consistency and finite values.
    pub(crate) fn from_raw(
        features: Vec<f64>,
        n_cols: usize,
        labels: Vec<u32>,
        row_ids: Vec<u64>,
        n_classes: u32,
    ) -> Self {
        debug_assert_eq!(features.len(), labels.len() * n_cols);
        debug_assert_eq!(labels.len(), row_ids.len());
        Self {
            features,
            n_cols,
            labels,
            row_ids,
            n_classes,
            feature_names: None,
            label_names: None,
            label_col_name: "label".into(),
        }
    }

    /// Builds a dataset that reuses `template`'s column metadata and class
    /// space. Used when deriving rows (subsets, unions, synthetics) from an
    /// existing dataset.
    pub(crate) fn with_template(
        template: &Dataset,
        features: Vec<f64>,
        labels: Vec<u32>,
        row_ids: Vec<u64>,
    ) -> Self {
        debug_assert_eq!(features.len(), labels.len() * template.n_cols);
        debug_assert_eq!(labels.len(), row_ids.len());
        Self {
            features,
            n_cols: template.n_cols,
            labels,
            row_ids,
            n_classes: template.n_classes,
            feature_names: template.feature_names.clone(),
            label_names: template.label_names.clone(),
            label_col_name: template.label_col_name.clone(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Size of the label encoding space. Subsets keep the full space even
    /// when some classes are absent from their rows.
    pub fn n_classes(&self) -> u32 {
        self.n_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Original token for a dense label; falls back to the dense value for
    /// datasets built programmatically.
    pub fn label_name(&self, label: u32) -> String {
        match &self.label_names {
            Some(names) if (label as usize) < names.len() => names[label as usize].clone(),
            _ => label.to_string(),
        }
    }

    pub fn max_row_id(&self) -> u64 {
        self.row_ids.iter().copied().max().unwrap_or(0)
    }

    /// Row counts for every class present, in ascending label order.
    pub fn class_counts(&self) -> Vec<ClassSummary> {
        let mut counts = vec![0usize; self.n_classes as usize];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(l, &c)| ClassSummary {
                label: l as u32,
                name: self.label_name(l as u32),
                count: c,
            })
            .collect()
    }

    /// Rows whose label equals (`keep_equal`) or differs from the argument.
    /// Row ids are preserved.
    pub fn filter_by_label(&self, label: u32, keep_equal: bool) -> Dataset {
        let idx: Vec<usize> = (0..self.n_rows())
            .filter(|&i| (self.labels[i] == label) == keep_equal)
            .collect();
        self.take_rows(&idx)
    }

    /// New dataset holding the given row positions, ids preserved.
    pub fn take_rows(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_cols);
        let mut labels = Vec::with_capacity(indices.len());
        let mut row_ids = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
            row_ids.push(self.row_ids[i]);
        }
        Dataset::with_template(self, features, labels, row_ids)
    }

    /// Concatenates two datasets over the same columns. Row ids must stay
    /// unique across the union. Column metadata is taken from `self`.
    pub fn union(&self, other: &Dataset) -> Result<Dataset> {
        if self.n_cols != other.n_cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot union {} columns with {}",
                self.n_cols, other.n_cols
            )));
        }
        let mut seen: HashSet<u64> = self.row_ids.iter().copied().collect();
        for &id in &other.row_ids {
            if !seen.insert(id) {
                return Err(Error::DuplicateRowId(id));
            }
        }
        let mut features = self.features.clone();
        features.extend_from_slice(&other.features);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut row_ids = self.row_ids.clone();
        row_ids.extend_from_slice(&other.row_ids);
        let mut out = Dataset::with_template(self, features, labels, row_ids);
        out.n_classes = self.n_classes.max(other.n_classes);
        Ok(out)
    }

    /// Replaces the features of the row at position `i`.
    pub(crate) fn set_row(&mut self, i: usize, values: &[f64]) {
        debug_assert_eq!(values.len(), self.n_cols);
        self.features[i * self.n_cols..(i + 1) * self.n_cols].copy_from_slice(values);
    }

    /// Writes the dataset as CSV: feature columns, then the label column.
    /// Finite doubles are printed in shortest round-trip form, so reloading
    /// the file reproduces the exact same bits.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let header: Vec<String> = match &self.feature_names {
            Some(names) => names.clone(),
            None => (0..self.n_cols).map(|j| format!("x{j}")).collect(),
        };
        let mut full = header;
        full.push(self.label_col_name.clone());
        w.write_record(&full)?;
        let mut cell = String::new();
        for i in 0..self.n_rows() {
            let mut record = Vec::with_capacity(self.n_cols + 1);
            for v in self.row(i) {
                cell.clear();
                write!(cell, "{v}").unwrap();
                record.push(cell.clone());
            }
            record.push(self.label_name(self.labels[i]));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Loads an RFC-4180 CSV file. The label column is selected by header name
/// or zero-based index; every other column must hold finite numbers with
/// `.` as the decimal separator. Labels are re-encoded to dense `0..C-1`
/// in sorted token order (numeric when every token parses as a number,
/// lexicographic otherwise).
pub fn load_csv(path: &Path, label: &LabelColumn) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    let mut records = reader.records();

    let first = match records.next() {
        Some(r) => r?,
        None => return Err(Error::EmptyDataset),
    };
    let width = first.len();
    if width < 2 {
        return Err(Error::ShapeMismatch(
            "csv needs at least one feature column and one label column".into(),
        ));
    }

    // Resolve the label position and decide whether the first record is a
    // header: selecting by name requires one; selecting by index treats the
    // first record as data only when all its feature cells parse as numbers.
    let (label_pos, has_header) = match label {
        LabelColumn::Name(name) => {
            let pos = first.iter().position(|c| c == name).ok_or_else(|| Error::MissingLabelColumn {
                name: name.clone(),
            })?;
            (pos, true)
        }
        LabelColumn::Index(i) => {
            if *i >= width {
                return Err(Error::LabelIndexOutOfRange { index: *i, width });
            }
            let numeric = first
                .iter()
                .enumerate()
                .all(|(j, c)| j == *i || c.trim().parse::<f64>().is_ok());
            (*i, !numeric)
        }
    };

    let feature_names: Option<Vec<String>> = has_header.then(|| {
        first
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != label_pos)
            .map(|(_, c)| c.to_string())
            .collect()
    });
    let label_col_name = if has_header {
        first[label_pos].to_string()
    } else {
        "label".to_string()
    };

    let n_cols = width - 1;
    let column_name = |j: usize| -> String {
        match &feature_names {
            Some(names) => names[j].clone(),
            None => {
                let raw = if j < label_pos { j } else { j + 1 };
                (raw + 1).to_string()
            }
        }
    };

    let mut features = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut row = if has_header { 1 } else { 0 };
    let mut pending = if has_header { None } else { Some(first) };
    loop {
        let record = match pending.take() {
            Some(r) => r,
            None => match records.next() {
                Some(r) => r?,
                None => break,
            },
        };
        row += 1;
        if record.len() != width {
            return Err(Error::ShapeMismatch(format!(
                "row {row} has {} cells, expected {width}",
                record.len()
            )));
        }
        let mut j = 0;
        for (pos, cell) in record.iter().enumerate() {
            if pos == label_pos {
                tokens.push(cell.to_string());
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row,
                column: column_name(j),
                found: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    row,
                    column: column_name(j),
                });
            }
            features.push(value);
            j += 1;
        }
    }

    if tokens.is_empty() {
        return Err(Error::EmptyDataset);
    }

    // Dense label encoding in sorted token order.
    let mut unique: Vec<String> = {
        let set: HashSet<&str> = tokens.iter().map(|s| s.as_str()).collect();
        set.into_iter().map(|s| s.to_string()).collect()
    };
    let all_numeric = unique.iter().all(|t| t.parse::<f64>().map(|v| v.is_finite()).unwrap_or(false));
    if all_numeric {
        unique.sort_by(|a, b| {
            let (x, y): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
            x.partial_cmp(&y).unwrap().then_with(|| a.cmp(b))
        });
    } else {
        unique.sort();
    }
    let index_of = |t: &str| unique.iter().position(|u| u == t).unwrap() as u32;
    let labels: Vec<u32> = tokens.iter().map(|t| index_of(t)).collect();

    let n_rows = labels.len();
    let row_ids = (0..n_rows as u64).collect();
    Ok(Dataset {
        features,
        n_cols,
        labels,
        row_ids,
        n_classes: unique.len() as u32,
        feature_names,
        label_names: Some(unique),
        label_col_name,
    })
}
