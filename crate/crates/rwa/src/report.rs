//! Schema-versioned JSON reports and the run manifest embedded in each.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adapt::{RwaConfig, RwaTrace};
use crate::chain::{PiiReport, StationaryDistribution, TransitionEstimate};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Provenance block embedded in every emitted report: the command, its full
/// argument echo, the seed, digests of every input file, tool version, and
/// wall-clock bounds. Identical manifests (up to timestamps) imply
/// identical numerical outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args_echo: String,
    pub seed: Option<u64>,
    pub input_digests: BTreeMap<String, String>,
    pub tool_version: String,
    pub started_utc: String,
    pub finished_utc: Option<String>,
}

impl RunManifest {
    pub fn start(command: &str, args_echo: String, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            args_echo,
            seed,
            input_digests: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_utc: chrono::Utc::now().to_rfc3339(),
            finished_utc: None,
        }
    }

    /// Record the SHA-256 digest of an input file.
    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let digest = Sha256::digest(&bytes);
        self.input_digests
            .insert(path.display().to_string(), format!("{digest:x}"));
        Ok(())
    }

    pub fn finish(&mut self) {
        self.finished_utc = Some(chrono::Utc::now().to_rfc3339());
    }
}

/// One adaptation iteration in a report: the diagnostics series without the
/// full labeling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRow {
    pub k: usize,
    pub agreement_with_prev: f64,
    pub margin: Option<f64>,
    pub accuracy: Option<f64>,
    pub wall_ms: f64,
    pub fallback_uses: usize,
}

/// Report written by the `adapt` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptReport {
    pub schema_version: u32,
    pub manifest: RunManifest,
    pub config: RwaConfig,
    pub resolved_quota: usize,
    pub n_target_examples: usize,
    pub n_classes: usize,
    /// Final majority-vote class ids, one per target example.
    pub final_labels: Vec<usize>,
    /// Final labels mapped back to the source domain's raw label values,
    /// when the mapping is known.
    pub final_raw_labels: Option<Vec<f64>>,
    pub initial_accuracy: Option<f64>,
    pub final_accuracy: Option<f64>,
    pub iterations: Vec<IterationRow>,
}

impl AdaptReport {
    pub fn from_trace(
        manifest: RunManifest,
        config: RwaConfig,
        resolved_quota: usize,
        final_labels: Vec<usize>,
        final_raw_labels: Option<Vec<f64>>,
        final_accuracy: Option<f64>,
        trace: &RwaTrace,
    ) -> Self {
        AdaptReport {
            schema_version: REPORT_SCHEMA_VERSION,
            n_target_examples: trace.initial.len(),
            n_classes: trace.initial.n_classes(),
            iterations: trace
                .iterations
                .iter()
                .enumerate()
                .map(|(i, rec)| IterationRow {
                    k: i + 1,
                    agreement_with_prev: rec.agreement_with_prev,
                    margin: rec.margin,
                    accuracy: rec.accuracy,
                    wall_ms: rec.wall_ms,
                    fallback_uses: rec.fallback_uses,
                })
                .collect(),
            initial_accuracy: trace.initial_accuracy,
            manifest,
            config,
            resolved_quota,
            final_labels,
            final_raw_labels,
            final_accuracy,
        }
    }
}

/// Report written by the `chain` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub schema_version: u32,
    pub manifest: RunManifest,
    /// Labeling states, row-major with class ids per example. Empty in
    /// matrix-fixture mode.
    pub states: Vec<Vec<usize>>,
    pub c_target: Option<f64>,
    pub estimate: Option<TransitionEstimate>,
    /// Row-major transition matrix actually analyzed (estimated or loaded).
    pub transition_rows: Vec<Vec<f64>>,
    pub overflow: Vec<f64>,
    /// Unique stationary distribution, when the chain is irreducible.
    pub stationary: Option<StationaryDistribution>,
    /// Per-state stability s_m(Yⁱ) = π(i), when defined.
    pub stabilities: Option<Vec<f64>>,
    /// Set when the estimated chain is reducible: an absorbing labeling
    /// exists and no unique stationary distribution is defined.
    pub reducible_note: Option<String>,
    pub pii: Vec<PiiReport>,
}

/// Hand-given transition matrix file: `{"p": [[…], …]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub p: Vec<Vec<f64>>,
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())))
}
