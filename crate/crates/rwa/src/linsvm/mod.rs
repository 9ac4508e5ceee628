//! From-scratch linear SVM: binary soft-margin training by dual coordinate
//! descent, one-versus-all multiclass, support-vector extraction, and C
//! selection by cross-validation.

mod model_file;
mod solver;

pub use model_file::{load_model_file, save_model_file, BinaryModelRecord, ModelFile};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adapt::Labeling;
use crate::data::Dataset;
use crate::{Error, Result};

/// Default C grid for cross-validation: decades from 1e−3 to 1e3.
pub const DEFAULT_C_GRID: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];
/// Default number of cross-validation folds.
pub const DEFAULT_CV_FOLDS: usize = 5;

/// Solver configuration. Defaults: tolerance 1e−6, at most 2000 epochs,
/// coordinate-shuffle seed 0. The tolerance is tight enough that the
/// trained objective tracks the exact optimum to 1e−4 relative on small
/// problems.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainOptions {
    pub c: f64,
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl TrainOptions {
    pub fn new(c: f64) -> Self {
        TrainOptions {
            c,
            tol: 1e-6,
            max_epochs: 2000,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Solver run metadata kept with a trained model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
    pub epochs_run: usize,
    pub converged: bool,
}

/// A trained binary SVM: weight vector, bias, dual coefficients, and the
/// support-vector index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub dual_coefs: Vec<f64>,
    pub support_indices: Vec<usize>,
    pub c: f64,
    pub solver: SolverInfo,
}

impl SvmModel {
    /// Raw decision value w·x + b for one example.
    pub fn score(&self, data: &Dataset, i: usize) -> f64 {
        data.dot(i, &self.weights) + self.bias
    }

    /// Decision values for every example.
    pub fn scores(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.n_features() != self.weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "model has {} features, dataset has {}",
                self.weights.len(),
                data.n_features()
            )));
        }
        Ok((0..data.n_examples())
            .map(|i| self.score(data, i))
            .collect())
    }

    /// Geometric margin 1/‖w‖₂ (bias excluded from the norm).
    pub fn geometric_margin(&self) -> Result<f64> {
        let norm = self.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Numerical("zero weight vector has no margin".into()));
        }
        Ok(1.0 / norm)
    }

    /// Primal objective (1/2)(‖w‖² + b²) + C Σ hinge on the given training
    /// data; used by equivalence checks against independent solvers.
    pub fn primal_objective(&self, data: &Dataset, signs: &[i8]) -> f64 {
        let reg = 0.5 * (self.weights.iter().map(|w| w * w).sum::<f64>() + self.bias * self.bias);
        let hinge: f64 = (0..data.n_examples())
            .map(|i| (1.0 - signs[i] as f64 * self.score(data, i)).max(0.0))
            .sum();
        reg + self.c * hinge
    }
}

/// Per-class weight vectors and biases; the uniform container for source,
/// bootstrap, and combined hypotheses.
///
/// Binary hypotheses are stored as two mirrored rows (row 1 = −row 0), so
/// combination and argmax logic is the same for every class count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearHypothesis {
    class_weights: Vec<Vec<f64>>,
    class_biases: Vec<f64>,
}

impl LinearHypothesis {
    pub fn new(class_weights: Vec<Vec<f64>>, class_biases: Vec<f64>) -> Result<Self> {
        if class_weights.len() < 2 {
            return Err(Error::InvalidInput(
                "a hypothesis needs at least 2 classes".into(),
            ));
        }
        if class_weights.len() != class_biases.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weight rows vs {} biases",
                class_weights.len(),
                class_biases.len()
            )));
        }
        let width = class_weights[0].len();
        if class_weights.iter().any(|row| row.len() != width) {
            return Err(Error::DimensionMismatch("ragged weight rows".into()));
        }
        Ok(LinearHypothesis {
            class_weights,
            class_biases,
        })
    }

    /// Mirror a binary model into the two-row form; the model's positive
    /// side is class 1.
    pub fn from_binary(model: &SvmModel) -> Self {
        let neg: Vec<f64> = model.weights.iter().map(|w| -w).collect();
        LinearHypothesis {
            class_weights: vec![neg, model.weights.clone()],
            class_biases: vec![-model.bias, model.bias],
        }
    }

    /// All-zero hypothesis (scores 0 everywhere, predicts class 0).
    pub fn zero(n_classes: usize, n_features: usize) -> Result<Self> {
        LinearHypothesis::new(vec![vec![0.0; n_features]; n_classes], vec![0.0; n_classes])
    }

    pub fn n_classes(&self) -> usize {
        self.class_weights.len()
    }

    pub fn n_features(&self) -> usize {
        self.class_weights[0].len()
    }

    pub fn class_weights(&self) -> &[Vec<f64>] {
        &self.class_weights
    }

    pub fn class_biases(&self) -> &[f64] {
        &self.class_biases
    }

    /// Score matrix: entry `[i][c]` is w_c·x_i + b_c.
    pub fn decision_scores(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        if data.n_features() != self.n_features() {
            return Err(Error::DimensionMismatch(format!(
                "hypothesis has {} features, dataset has {}",
                self.n_features(),
                data.n_features()
            )));
        }
        Ok((0..data.n_examples())
            .map(|i| {
                self.class_weights
                    .iter()
                    .zip(&self.class_biases)
                    .map(|(w, b)| data.dot(i, w) + b)
                    .collect()
            })
            .collect())
    }

    /// Per-example argmax of scores; ties break toward the lowest class id.
    pub fn predict(&self, data: &Dataset) -> Result<Labeling> {
        let scores = self.decision_scores(data)?;
        let assignments = scores.iter().map(|row| argmax_lowest(row)).collect();
        Labeling::new(assignments, self.n_classes())
    }

    /// Entrywise sum of two hypotheses. The sum is argmax-equivalent to the
    /// average, and matches how bootstrap and source hypotheses are merged.
    pub fn combine(&self, other: &LinearHypothesis) -> Result<LinearHypothesis> {
        if self.n_classes() != other.n_classes() || self.n_features() != other.n_features() {
            return Err(Error::DimensionMismatch(format!(
                "cannot combine {}x{} with {}x{}",
                self.n_classes(),
                self.n_features(),
                other.n_classes(),
                other.n_features()
            )));
        }
        let class_weights = self
            .class_weights
            .iter()
            .zip(&other.class_weights)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        let class_biases = self
            .class_biases
            .iter()
            .zip(&other.class_biases)
            .map(|(a, b)| a + b)
            .collect();
        Ok(LinearHypothesis {
            class_weights,
            class_biases,
        })
    }
}

pub(crate) fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

/// Train a binary SVM; `signs` holds ±1 per example.
pub fn train_binary(data: &Dataset, signs: &[i8], c: f64) -> Result<SvmModel> {
    train_binary_with(data, signs, TrainOptions::new(c))
}

/// Train a binary SVM with explicit solver options.
pub fn train_binary_with(data: &Dataset, signs: &[i8], opts: TrainOptions) -> Result<SvmModel> {
    if signs.len() != data.n_examples() {
        return Err(Error::DimensionMismatch(format!(
            "{} signs for {} examples",
            signs.len(),
            data.n_examples()
        )));
    }
    if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
        return Err(Error::InvalidInput(format!("sign label {bad} is not ±1")));
    }
    if opts.c <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "C must be positive, got {}",
            opts.c
        )));
    }
    let pos = signs.iter().filter(|&&s| s == 1).count();
    if pos == 0 || pos == signs.len() {
        return Err(Error::SingleClass);
    }

    let out = solver::solve(
        data,
        signs,
        &solver::SolverParams {
            c: opts.c,
            tol: opts.tol,
            max_epochs: opts.max_epochs,
            seed: opts.seed,
        },
    );

    let sv_tol = 1e-9 * opts.c;
    let support_indices = out
        .alpha
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a > sv_tol)
        .map(|(i, _)| i)
        .collect();

    Ok(SvmModel {
        weights: out.weights,
        bias: out.bias,
        dual_coefs: out.alpha,
        support_indices,
        c: opts.c,
        solver: SolverInfo {
            tol: opts.tol,
            max_epochs: opts.max_epochs,
            seed: opts.seed,
            epochs_run: out.epochs,
            converged: out.converged,
        },
    })
}

/// Train a one-versus-all hypothesis from a labeled dataset.
///
/// Requires at least 2 classes and at least one example of every class.
/// The binary case trains a single model (class 1 positive) and mirrors it.
pub fn train_ova(data: &Dataset, c: f64) -> Result<LinearHypothesis> {
    train_ova_with(data, TrainOptions::new(c))
}

/// One-versus-all training with explicit solver options; per-class runs use
/// seeds derived from `opts.seed` so results do not depend on scheduling.
pub fn train_ova_with(data: &Dataset, opts: TrainOptions) -> Result<LinearHypothesis> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::InvalidInput("one-versus-all training needs labels".into()))?;
    let n_classes = data.n_classes();
    if n_classes < 2 {
        return Err(Error::InvalidInput(format!(
            "one-versus-all needs at least 2 classes, got {n_classes}"
        )));
    }
    let counts = data.class_counts();
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyClass {
            class: empty,
            context: " in training data".into(),
        });
    }

    if n_classes == 2 {
        let signs: Vec<i8> = labels
            .iter()
            .map(|&l| if l == 1 { 1 } else { -1 })
            .collect();
        let model = train_binary_with(data, &signs, opts)?;
        return Ok(LinearHypothesis::from_binary(&model));
    }

    let mut class_weights = Vec::with_capacity(n_classes);
    let mut class_biases = Vec::with_capacity(n_classes);
    for class in 0..n_classes {
        let signs: Vec<i8> = labels
            .iter()
            .map(|&l| if l == class { 1 } else { -1 })
            .collect();
        let class_opts = TrainOptions {
            seed: opts.seed ^ class as u64,
            ..opts
        };
        let model = train_binary_with(data, &signs, class_opts)?;
        class_weights.push(model.weights);
        class_biases.push(model.bias);
    }
    LinearHypothesis::new(class_weights, class_biases)
}

/// Train the per-class binary models of a one-versus-all hypothesis and
/// return them alongside it (support-vector sets are per binary problem).
pub fn train_ova_models(
    data: &Dataset,
    opts: TrainOptions,
) -> Result<(LinearHypothesis, Vec<SvmModel>)> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::InvalidInput("one-versus-all training needs labels".into()))?;
    let hypothesis = train_ova_with(data, opts)?;
    if data.n_classes() == 2 {
        let signs: Vec<i8> = labels
            .iter()
            .map(|&l| if l == 1 { 1 } else { -1 })
            .collect();
        let model = train_binary_with(data, &signs, opts)?;
        return Ok((hypothesis, vec![model]));
    }
    let mut models = Vec::with_capacity(data.n_classes());
    for class in 0..data.n_classes() {
        let signs: Vec<i8> = labels
            .iter()
            .map(|&l| if l == class { 1 } else { -1 })
            .collect();
        let class_opts = TrainOptions {
            seed: opts.seed ^ class as u64,
            ..opts
        };
        models.push(train_binary_with(data, &signs, class_opts)?);
    }
    Ok((hypothesis, models))
}

/// Pick C from `grid` by stratified k-fold cross-validation: highest mean
/// fold accuracy, ties broken toward the smallest C.
pub fn cross_validate_c(data: &Dataset, grid: &[f64], folds: usize, seed: u64) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty C grid".into()));
    }
    if folds < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    let labels = data
        .labels()
        .ok_or_else(|| Error::InvalidInput("cross-validation needs labels".into()))?;
    let counts = data.class_counts();
    if let Some((class, &count)) = counts.iter().enumerate().find(|&(_, &c)| c < folds) {
        return Err(Error::InvalidInput(format!(
            "class {class} has {count} examples, fewer than {folds} folds"
        )));
    }

    // Stratified folds: shuffle each class's indices, deal them round-robin.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; data.n_examples()];
    for class in 0..data.n_classes() {
        let mut members: Vec<usize> = (0..data.n_examples())
            .filter(|&i| labels[i] == class)
            .collect();
        members.shuffle(&mut rng);
        for (k, &i) in members.iter().enumerate() {
            fold_of[i] = k % folds;
        }
    }

    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite C grid"));

    let mut best: Option<(f64, f64)> = None; // (c, mean accuracy)
    for &c in &grid {
        let mut fold_acc = Vec::with_capacity(folds);
        for fold in 0..folds {
            let train_idx: Vec<usize> = (0..data.n_examples())
                .filter(|&i| fold_of[i] != fold)
                .collect();
            let test_idx: Vec<usize> = (0..data.n_examples())
                .filter(|&i| fold_of[i] == fold)
                .collect();
            let train = data.select(&train_idx);
            let test = data.select(&test_idx);
            let hypothesis = train_ova_with(&train, TrainOptions::new(c).with_seed(seed))?;
            let predicted = hypothesis.predict(&test)?;
            let correct = test_idx
                .iter()
                .enumerate()
                .filter(|&(k, &i)| predicted.assignments()[k] == labels[i])
                .count();
            fold_acc.push(correct as f64 / test_idx.len() as f64);
        }
        let mean = fold_acc.iter().sum::<f64>() / folds as f64;
        if best.is_none_or(|(_, acc)| mean > acc) {
            best = Some((c, mean));
        }
    }
    Ok(best.expect("grid is non-empty").0)
}
