//! Sparse datasets, file ingestion, preprocessing recipes, and the two
//! synthetic domain-adaptation toys.

mod csv_io;
mod preprocess;
mod svmlight;
mod toy;

pub use csv_io::load_dense_csv;
pub use preprocess::{fit_recipe, PreprocessRecipe, RecipeKind};
pub use svmlight::{load_svmlight, load_svmlight_with, save_svmlight};
pub use toy::{
    generate_line_toy, generate_rotated_toy, DEFAULT_NOISE_SCALES, DEFAULT_N_PER_CLASS,
    DEFAULT_ROTATION_DEGREES,
};

use crate::{Error, Result};

/// A sparse example matrix with optional contiguous 0-based class labels.
///
/// Canonical form: within each row, feature indices are strictly increasing,
/// every index is `< n_features`, and no zero values are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_features: usize,
    rows: Vec<Vec<(usize, f64)>>,
    labels: Option<Vec<usize>>,
    n_classes: usize,
    /// Original label value per class id, when the labels came from a file
    /// whose raw labels were remapped (sorted ascending).
    class_labels: Option<Vec<f64>>,
}

impl Dataset {
    /// Build an unlabeled dataset, validating and canonicalizing rows
    /// (explicit zeros are dropped).
    pub fn unlabeled(n_features: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let rows = canonicalize_rows(n_features, rows)?;
        Ok(Dataset {
            n_features,
            rows,
            labels: None,
            n_classes: 0,
            class_labels: None,
        })
    }

    /// Build a labeled dataset with explicit class count.
    pub fn labeled(
        n_features: usize,
        rows: Vec<Vec<(usize, f64)>>,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} examples",
                labels.len(),
                rows.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::InvalidInput(format!(
                "label {bad} out of range for {n_classes} classes"
            )));
        }
        let rows = canonicalize_rows(n_features, rows)?;
        Ok(Dataset {
            n_features,
            rows,
            labels: Some(labels),
            n_classes,
            class_labels: None,
        })
    }

    /// Build a labeled dataset from raw numeric labels, remapping them to
    /// contiguous 0-based ids in sorted order and recording the mapping.
    pub fn from_raw_labels(
        n_features: usize,
        rows: Vec<Vec<(usize, f64)>>,
        raw_labels: Vec<f64>,
    ) -> Result<Self> {
        if raw_labels.iter().any(|l| l.is_nan()) {
            return Err(Error::InvalidInput("NaN label".into()));
        }
        let mut distinct: Vec<f64> = raw_labels.clone();
        distinct.sort_by(|a, b| a.partial_cmp(b).expect("no NaN labels"));
        distinct.dedup();
        let labels = raw_labels
            .iter()
            .map(|l| distinct.partition_point(|d| d < l))
            .collect();
        let mut ds = Dataset::labeled(n_features, rows, labels, distinct.len())?;
        ds.class_labels = Some(distinct);
        Ok(ds)
    }

    pub fn n_examples(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Number of classes; 0 when unlabeled.
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Original label value per class id, when known.
    pub fn class_labels(&self) -> Option<&[f64]> {
        self.class_labels.as_deref()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Dot product of row `i` with a dense weight vector.
    pub fn dot(&self, i: usize, weights: &[f64]) -> f64 {
        self.rows[i].iter().map(|&(j, v)| weights[j] * v).sum()
    }

    /// Squared Euclidean norm of row `i`.
    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, v)| v * v).sum()
    }

    /// Row `i` as a dense vector.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        for &(j, v) in &self.rows[i] {
            out[j] = v;
        }
        out
    }

    /// Number of examples per class (empty when unlabeled).
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        if let Some(labels) = &self.labels {
            for &l in labels {
                counts[l] += 1;
            }
        }
        counts
    }

    /// Same rows without any label information.
    pub fn strip_labels(&self) -> Dataset {
        Dataset {
            n_features: self.n_features,
            rows: self.rows.clone(),
            labels: None,
            n_classes: 0,
            class_labels: None,
        }
    }

    /// Same rows with replacement labels (used to pair the target with a
    /// provisional labeling).
    pub fn with_label_ids(&self, labels: Vec<usize>, n_classes: usize) -> Result<Dataset> {
        let mut ds = Dataset::labeled(self.n_features, self.rows.clone(), labels, n_classes)?;
        ds.class_labels = self.class_labels.clone();
        Ok(ds)
    }

    /// New dataset drawing rows (with repetition allowed) by index; labels
    /// are supplied by the caller.
    pub fn gather(
        &self,
        indices: &[usize],
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Dataset> {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        Dataset::labeled(self.n_features, rows, labels, n_classes)
    }

    /// Subset of rows by index, keeping labels when present.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            n_features: self.n_features,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            n_classes: self.n_classes,
            class_labels: self.class_labels.clone(),
        }
    }

    /// Raise the feature count (e.g. to match a model trained with more
    /// features). Fails if `n` is below the current count.
    pub fn pad_features(mut self, n: usize) -> Result<Dataset> {
        if n < self.n_features {
            return Err(Error::DimensionMismatch(format!(
                "cannot shrink feature count from {} to {n}",
                self.n_features
            )));
        }
        self.n_features = n;
        Ok(self)
    }
}

fn canonicalize_rows(
    n_features: usize,
    rows: Vec<Vec<(usize, f64)>>,
) -> Result<Vec<Vec<(usize, f64)>>> {
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut prev: Option<usize> = None;
            for &(j, v) in &row {
                if j >= n_features {
                    return Err(Error::InvalidInput(format!(
                        "example {i}: feature index {j} out of range (n_features = {n_features})"
                    )));
                }
                if prev.is_some_and(|p| p >= j) {
                    return Err(Error::InvalidInput(format!(
                        "example {i}: feature indices not strictly increasing at {j}"
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "example {i}: non-finite value at feature {j}"
                    )));
                }
                prev = Some(j);
            }
            Ok(row.into_iter().filter(|&(_, v)| v != 0.0).collect())
        })
        .collect()
}
