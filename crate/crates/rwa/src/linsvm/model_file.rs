//! Versioned JSON serialization for trained hypotheses, used by the CLI's
//! train/apply split.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LinearHypothesis, SolverInfo, SvmModel};
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// One binary one-versus-all component: dense weights live in the parent
/// hypothesis; this record keeps the dual side and solver metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinaryModelRecord {
    pub positive_class: usize,
    pub support_indices: Vec<usize>,
    pub dual_coefs: Vec<f64>,
    pub solver: SolverInfo,
}

impl BinaryModelRecord {
    pub fn from_model(positive_class: usize, model: &SvmModel) -> Self {
        BinaryModelRecord {
            positive_class,
            support_indices: model.support_indices.clone(),
            dual_coefs: model.dual_coefs.clone(),
            solver: model.solver,
        }
    }
}

/// On-disk document for a trained hypothesis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub n_features: usize,
    pub n_classes: usize,
    pub hypothesis: LinearHypothesis,
    /// Original label value per class id, when the training data carried a
    /// remapping.
    pub class_labels: Option<Vec<f64>>,
    pub c: f64,
    pub binaries: Vec<BinaryModelRecord>,
}

impl ModelFile {
    pub fn new(
        hypothesis: LinearHypothesis,
        class_labels: Option<Vec<f64>>,
        c: f64,
        binaries: Vec<BinaryModelRecord>,
    ) -> Self {
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            n_features: hypothesis.n_features(),
            n_classes: hypothesis.n_classes(),
            hypothesis,
            class_labels,
            c,
            binaries,
        }
    }
}

pub fn save_model_file(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json =
        serde_json::to_string_pretty(model).map_err(|e| Error::ModelFormat(e.to_string()))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_model_file(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let model: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())))?;
    if model.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
            model.format_version
        )));
    }
    if model.hypothesis.n_features() != model.n_features
        || model.hypothesis.n_classes() != model.n_classes
    {
        return Err(Error::ModelFormat(
            "model header disagrees with hypothesis dimensions".into(),
        ));
    }
    Ok(model)
}
