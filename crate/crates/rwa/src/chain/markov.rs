//! Transition matrices over labeling states and their stationary
//! distributions.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LabelingStateSpace;
use crate::adapt::{balanced_bootstrap, EmptyClassFallback, Labeling};
use crate::data::Dataset;
use crate::linsvm::{train_ova_with, LinearHypothesis, TrainOptions};
use crate::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-9;

/// Row-stochastic matrix over labeling states, with an explicit per-row
/// overflow column for landings outside the enumerated space. Overflow is
/// reported, never renormalized away.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    p: Vec<Vec<f64>>,
    overflow: Vec<f64>,
    /// Draws used per row; 0 for exact (hand-given) matrices.
    sample_count: usize,
}

impl TransitionMatrix {
    /// Wrap an exact matrix (no overflow, `sample_count` 0). Every entry
    /// must lie in [0, 1] and every row must sum to 1 within 1e−9.
    pub fn from_rows(p: Vec<Vec<f64>>) -> Result<Self> {
        let n = p.len();
        for (i, row) in p.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotRowStochastic(format!(
                    "row {i} has {} entries in a {n}-state matrix",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::NotRowStochastic(format!("entry {bad} in row {i}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotRowStochastic(format!("row {i} sums to {sum}")));
            }
        }
        Ok(TransitionMatrix {
            p,
            overflow: vec![0.0; n],
            sample_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn overflow(&self) -> &[f64] {
        &self.overflow
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    pub fn total_overflow(&self) -> f64 {
        self.overflow.iter().sum()
    }
}

/// A stationary distribution π of a transition matrix: entries are
/// non-negative, sum to 1, and satisfy πP = π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryDistribution {
    pi: Vec<f64>,
}

impl StationaryDistribution {
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }
}

/// The unique stationary distribution of an irreducible row-stochastic
/// matrix, via a direct least-squares solve of the augmented system
/// (Pᵀ − I)π = 0, Σπ = 1. A direct solve handles periodic chains, which
/// power iteration would not.
pub fn stationary(p: &TransitionMatrix) -> Result<StationaryDistribution> {
    let n = p.dim();
    if n == 0 {
        return Err(Error::InvalidInput("empty transition matrix".into()));
    }
    for i in 0..n {
        let sum: f64 = p.p[i].iter().sum::<f64>() + p.overflow[i];
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::NotRowStochastic(format!("row {i} sums to {sum}")));
        }
        if p.overflow[i] > ROW_SUM_TOL {
            return Err(Error::NotRowStochastic(format!(
                "row {i} carries overflow mass {} outside the state space",
                p.overflow[i]
            )));
        }
    }
    check_strongly_connected(p)?;

    // Stack (Pᵀ − I) with the normalization row and least-squares solve.
    let a = DMatrix::from_fn(n + 1, n, |r, c| {
        if r < n {
            p.p[c][r] - if r == c { 1.0 } else { 0.0 }
        } else {
            1.0
        }
    });
    let mut b = DVector::zeros(n + 1);
    b[n] = 1.0;
    let solution = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Numerical(format!("stationary solve failed: {e}")))?;

    let mut pi: Vec<f64> = solution.iter().copied().collect();
    for v in &mut pi {
        if *v < 0.0 {
            if *v < -1e-9 {
                return Err(Error::Numerical(format!("negative stationary mass {v}")));
            }
            *v = 0.0;
        }
    }
    let sum: f64 = pi.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Numerical(format!("stationary mass sums to {sum}")));
    }
    for v in &mut pi {
        *v /= sum;
    }
    // πP = π within 1e−9 per component.
    for j in 0..n {
        let lhs: f64 = (0..n).map(|i| pi[i] * p.p[i][j]).sum();
        if (lhs - pi[j]).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "fixed-point residual {} at component {j}",
                (lhs - pi[j]).abs()
            )));
        }
    }
    Ok(StationaryDistribution { pi })
}

/// Per-state stability: the stationary probability of each labeling state.
pub fn stability(space: &LabelingStateSpace, p: &TransitionMatrix) -> Result<Vec<f64>> {
    if space.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} states vs {}x{} matrix",
            space.len(),
            p.dim(),
            p.dim()
        )));
    }
    Ok(stationary(p)?.pi.clone())
}

/// Strong connectivity of the positive-entry digraph, by forward and
/// backward reachability from state 0.
fn check_strongly_connected(p: &TransitionMatrix) -> Result<()> {
    let n = p.dim();
    let reach = |transpose: bool| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if transpose { p.p[j][i] } else { p.p[i][j] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    let forward = reach(false);
    let backward = reach(true);
    let unreachable: Vec<usize> = (0..n).filter(|&i| !forward[i] || !backward[i]).collect();
    if unreachable.is_empty() {
        Ok(())
    } else {
        Err(Error::ReducibleChain {
            from: 0,
            unreachable,
        })
    }
}

/// How subsamples are drawn when estimating transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsampleScheme {
    /// Class-balanced bootstrap, `quota` draws per class — the variant the
    /// adaptation loop uses.
    Balanced,
    /// Plain uniform sampling with replacement of `quota · n_classes`
    /// examples, ignoring class balance. Draws whose sample cannot be
    /// trained (single class) count into the overflow column.
    Uniform,
}

/// Estimator configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransitionEstimatorConfig {
    pub quota: usize,
    pub draws: usize,
    pub seed: u64,
    pub c_target: f64,
    pub scheme: SubsampleScheme,
    /// Total overflow fraction above which the estimate carries a warning.
    pub overflow_warn_fraction: f64,
}

impl TransitionEstimatorConfig {
    pub fn new(quota: usize, draws: usize, seed: u64, c_target: f64) -> Self {
        TransitionEstimatorConfig {
            quota,
            draws,
            seed,
            c_target,
            scheme: SubsampleScheme::Balanced,
            overflow_warn_fraction: 0.05,
        }
    }
}

/// An estimated transition matrix with its raw landing counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub matrix: TransitionMatrix,
    /// Landing counts per (row, state); each row plus its overflow count
    /// sums to `draws` exactly.
    pub counts: Vec<Vec<u64>>,
    pub overflow_counts: Vec<u64>,
    /// Set when the total overflow fraction exceeds the configured warning
    /// threshold: the enumerated space misses visited labelings.
    pub overflow_warning: bool,
}

/// Estimate transition probabilities by Monte Carlo: for each state i, draw
/// subsamples of `(target, Yⁱ)`, train a hypothesis, combine it with the
/// source, relabel the target, and record the landing state. Landings
/// outside the space accumulate in the overflow column.
///
/// Rows are estimated independently (in parallel) with per-row seeds
/// derived as `seed XOR row`, so results do not depend on scheduling. A
/// state that leaves a class empty cannot be resampled and is recorded as
/// an exact self-loop.
pub fn estimate_transitions(
    space: &LabelingStateSpace,
    target: &Dataset,
    source: &LinearHypothesis,
    cfg: &TransitionEstimatorConfig,
) -> Result<TransitionEstimate> {
    if cfg.draws == 0 {
        return Err(Error::InvalidInput("need at least 1 draw".into()));
    }
    if cfg.quota == 0 {
        return Err(Error::InvalidInput("quota must be at least 1".into()));
    }
    if space.is_empty() {
        return Err(Error::InvalidInput("empty state space".into()));
    }
    if source.n_classes() != 2 {
        return Err(Error::InvalidInput("chain analysis is binary-only".into()));
    }
    let unlabeled = target.strip_labels();

    let rows: Vec<Result<(Vec<u64>, u64)>> = space
        .states()
        .par_iter()
        .enumerate()
        .map(|(row, state)| estimate_row(space, &unlabeled, source, state, row, cfg))
        .collect();

    let mut counts = Vec::with_capacity(space.len());
    let mut overflow_counts = Vec::with_capacity(space.len());
    for row in rows {
        let (c, o) = row?;
        counts.push(c);
        overflow_counts.push(o);
    }

    let draws = cfg.draws as f64;
    let p: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / draws).collect())
        .collect();
    let overflow: Vec<f64> = overflow_counts.iter().map(|&c| c as f64 / draws).collect();
    let total_overflow: u64 = overflow_counts.iter().sum();
    let overflow_warning =
        total_overflow as f64 > cfg.overflow_warn_fraction * draws * space.len() as f64;

    Ok(TransitionEstimate {
        matrix: TransitionMatrix {
            p,
            overflow,
            sample_count: cfg.draws,
        },
        counts,
        overflow_counts,
        overflow_warning,
    })
}

fn estimate_row(
    space: &LabelingStateSpace,
    target: &Dataset,
    source: &LinearHypothesis,
    state: &Labeling,
    row: usize,
    cfg: &TransitionEstimatorConfig,
) -> Result<(Vec<u64>, u64)> {
    let mut counts = vec![0u64; space.len()];
    let mut overflow = 0u64;

    // Absorbing convention for a state with an empty class: no subsample of
    // it can be trained, so the walk cannot leave it.
    if state.class_pools().iter().any(|p| p.is_empty()) {
        counts[row] = cfg.draws as u64;
        return Ok((counts, overflow));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ row as u64);
    for draw in 0..cfg.draws {
        let solver_seed = (cfg.seed ^ row as u64).wrapping_add(draw as u64);
        let sample = match cfg.scheme {
            SubsampleScheme::Balanced => {
                balanced_bootstrap(
                    target,
                    state,
                    cfg.quota,
                    None,
                    EmptyClassFallback::Abort,
                    &mut rng,
                )?
                .0
            }
            SubsampleScheme::Uniform => {
                uniform_subsample(target, state, cfg.quota * state.n_classes(), &mut rng)?
            }
        };
        let trained = train_ova_with(
            &sample,
            TrainOptions::new(cfg.c_target).with_seed(solver_seed),
        );
        let landing = match trained {
            Ok(h) => h.combine(source)?.predict(target)?,
            // Untrainable draw (uniform scheme, single-class sample): the
            // landing is outside the modeled space.
            Err(Error::SingleClass | Error::EmptyClass { .. }) => {
                overflow += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match space.index_of(&landing) {
            Some(j) => counts[j] += 1,
            None => overflow += 1,
        }
    }
    Ok((counts, overflow))
}

fn uniform_subsample(
    target: &Dataset,
    y: &Labeling,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    use rand::Rng;
    let n = target.n_examples();
    let mut indices = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    for _ in 0..size {
        let i = rng.gen_range(0..n);
        indices.push(i);
        labels.push(y.assignments()[i]);
    }
    target.gather(&indices, labels, y.n_classes())
}
