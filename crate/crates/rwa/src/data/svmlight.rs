//! svmlight text format: one example per line, `<label> <index>:<value> ...`
//! with 1-based feature indices. Text after `#` is ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::Dataset;
use crate::{Error, Result};

/// Load an svmlight file. Feature count is the maximum index seen; labels
/// are remapped to contiguous 0-based ids in sorted order of the raw values.
pub fn load_svmlight(path: impl AsRef<Path>) -> Result<Dataset> {
    load_svmlight_with(path, None)
}

/// Load an svmlight file with an explicit feature-count override (must be
/// at least the maximum index in the file).
pub fn load_svmlight_with(path: impl AsRef<Path>, n_features: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, raw_line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad label `{label_tok}`")))?;
        if label.is_nan() {
            return Err(Error::parse(path, lineno, "NaN label"));
        }

        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| {
                Error::parse(path, lineno, format!("expected index:value, got `{tok}`"))
            })?;
            let idx: usize = idx_s
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad feature index `{idx_s}`")))?;
            if idx == 0 {
                return Err(Error::parse(
                    path,
                    lineno,
                    "feature index 0 (svmlight is 1-based)",
                ));
            }
            if idx <= prev {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("feature indices not strictly increasing at {idx}"),
                ));
            }
            let val: f64 = val_s
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad feature value `{val_s}`")))?;
            if !val.is_finite() {
                return Err(Error::parse(path, lineno, "non-finite feature value"));
            }
            prev = idx;
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        rows.push(row);
        raw_labels.push(label);
    }

    let n_features = match n_features {
        Some(n) if n < max_index => {
            return Err(Error::InvalidInput(format!(
                "feature-count override {n} is below maximum index {max_index} in {}",
                path.display()
            )))
        }
        Some(n) => n,
        None => max_index,
    };

    Dataset::from_raw_labels(n_features, rows, raw_labels)
}

/// Write a dataset in svmlight format (1-based indices). Labels are written
/// as the original raw values when the mapping is known, otherwise as the
/// 0-based class id; unlabeled rows get label `0`. Values use Rust's
/// shortest round-trip formatting, so load∘save is exact.
pub fn save_svmlight(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for i in 0..dataset.n_examples() {
        let label = match (dataset.labels(), dataset.class_labels()) {
            (Some(labels), Some(raw)) => raw[labels[i]],
            (Some(labels), None) => labels[i] as f64,
            (None, _) => 0.0,
        };
        out.push_str(&format!("{label}"));
        for &(j, v) in dataset.row(i) {
            out.push_str(&format!(" {}:{v}", j + 1));
        }
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}
