//! Dense numeric CSV ingestion.

use std::path::Path;

use super::Dataset;
use crate::{Error, Result};

/// Load a rectangular numeric CSV as a dataset, converting dense rows to
/// canonical sparse form (zeros dropped). When `label_column` is given,
/// that column supplies raw labels (remapped to contiguous 0-based ids);
/// otherwise the dataset is unlabeled.
pub fn load_dense_csv(
    path: impl AsRef<Path>,
    label_column: Option<usize>,
    has_header: bool,
) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;

    let header_offset = if has_header { 2 } else { 1 };
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut n_cols: Option<usize> = None;

    for (i, record) in reader.records().enumerate() {
        let lineno = i + header_offset;
        let record = record.map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let width = record.len();
        match n_cols {
            None => n_cols = Some(width),
            Some(w) if w != width => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("ragged row: {width} columns, expected {w}"),
                ))
            }
            _ => {}
        }
        if let Some(lc) = label_column {
            if lc >= width {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("label column {lc} out of range for {width} columns"),
                ));
            }
        }

        let mut row = Vec::new();
        let mut feature = 0usize;
        for (col, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                Error::parse(
                    path,
                    lineno,
                    format!("non-numeric cell `{cell}` in column {col}"),
                )
            })?;
            if Some(col) == label_column {
                raw_labels.push(value);
            } else {
                if value != 0.0 {
                    row.push((feature, value));
                }
                feature += 1;
            }
        }
        rows.push(row);
    }

    let n_features = n_cols
        .unwrap_or(0)
        .saturating_sub(usize::from(label_column.is_some()));
    match label_column {
        Some(_) => Dataset::from_raw_labels(n_features, rows, raw_labels),
        None => Dataset::unlabeled(n_features, rows),
    }
}
