//! Closed-form bounds and their Monte-Carlo verification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adapt::{balanced_bootstrap, EmptyClassFallback, Labeling};
use crate::data::Dataset;
use crate::linsvm::{train_binary_with, LinearHypothesis, TrainOptions};
use crate::{Error, Result};

/// z-score of the two-sided 99% normal confidence interval.
const Z_99: f64 = 2.5758293035489004;

/// Lower bound on the probability that a size-`m` sample drawn with
/// replacement from `n` items contains all of `d` marked items:
/// (1 − (1 − 1/n)^m)^d, or the exponential approximation
/// (1 − e^(−m/n))^d when `approximate` is set.
pub fn containment_bound(n: usize, m: usize, d: usize, approximate: bool) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let per_item = if approximate {
        1.0 - (-(m as f64) / n as f64).exp()
    } else {
        1.0 - (1.0 - 1.0 / n as f64).powi(m as i32)
    };
    Ok(per_item.powi(d as i32))
}

/// Generalization bound for the maximum-margin hyperplane with `d` support
/// vectors over `l` examples, at confidence 1 − δ:
/// (1/(l−d))·(d·ln(e·l/d) + ln(l/δ)). Natural logarithms; the value may
/// exceed 1 and is reported as-is.
pub fn generalization_bound(l: usize, d: usize, delta: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be at least 1".into()));
    }
    if l <= d {
        return Err(Error::InvalidInput(format!(
            "bound is vacuous for l = {l} ≤ d = {d}"
        )));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta {delta} outside (0, 1)")));
    }
    let (l, d) = (l as f64, d as f64);
    Ok((d * (std::f64::consts::E * l / d).ln() + (l / delta).ln()) / (l - d))
}

/// Result of checking the self-transition lower bound on one state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PiiReport {
    /// Monte-Carlo estimate of the self-transition probability.
    pub p_ii_hat: f64,
    /// Containment lower bound at n = |T|, m = quota · n_classes, with d
    /// the support count of the full-data SVM.
    pub bound: f64,
    /// Support-vector count of the SVM trained on the full `(target, y)`.
    pub support_count: usize,
    /// 99% binomial confidence half-width of the estimate.
    pub half_width_99: f64,
    pub draws: usize,
}

impl PiiReport {
    /// Whether the estimate is consistent with `p_ii ≥ bound` at the given
    /// number of binomial standard deviations.
    pub fn holds_within(&self, sigmas: f64) -> bool {
        let sigma = (self.p_ii_hat * (1.0 - self.p_ii_hat) / self.draws as f64).sqrt();
        self.p_ii_hat >= self.bound - sigmas * sigma
    }
}

/// Verify the self-transition bound p_ii ≥ P(D_i ⊆ B) on one labeling
/// state: train the full-data SVM on `(target, y)` to count its support
/// vectors, evaluate the containment bound, and Monte-Carlo-estimate p̂_ii
/// as the fraction of balanced bootstrap draws whose combined relabeling
/// reproduces `y` exactly.
pub fn verify_pii_bound(
    target: &Dataset,
    y: &Labeling,
    source: &LinearHypothesis,
    quota: usize,
    draws: usize,
    seed: u64,
    c_target: f64,
) -> Result<PiiReport> {
    if draws < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 draws for the bound check, got {draws}"
        )));
    }
    if y.n_classes() != 2 || source.n_classes() != 2 {
        return Err(Error::InvalidInput("chain analysis is binary-only".into()));
    }
    if y.len() != target.n_examples() {
        return Err(Error::DimensionMismatch(format!(
            "labeling covers {} examples, target has {}",
            y.len(),
            target.n_examples()
        )));
    }
    let unlabeled = target.strip_labels();

    let signs: Vec<i8> = y
        .assignments()
        .iter()
        .map(|&c| if c == 1 { 1 } else { -1 })
        .collect();
    let full = train_binary_with(
        &unlabeled,
        &signs,
        TrainOptions::new(c_target).with_seed(seed),
    )?;
    let support_count = full.support_indices.len();

    let m = quota * y.n_classes();
    let bound = containment_bound(target.n_examples(), m, support_count, false)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for draw in 0..draws {
        let (sample, _) = balanced_bootstrap(
            &unlabeled,
            y,
            quota,
            None,
            EmptyClassFallback::Abort,
            &mut rng,
        )?;
        let h = train_ova_seeded(&sample, c_target, seed.wrapping_add(draw as u64))?;
        let landing = h.combine(source)?.predict(&unlabeled)?;
        if landing == *y {
            hits += 1;
        }
    }
    let p_ii_hat = hits as f64 / draws as f64;
    let half_width_99 = Z_99 * (p_ii_hat * (1.0 - p_ii_hat) / draws as f64).sqrt();

    Ok(PiiReport {
        p_ii_hat,
        bound,
        support_count,
        half_width_99,
        draws,
    })
}

fn train_ova_seeded(sample: &Dataset, c: f64, seed: u64) -> Result<LinearHypothesis> {
    crate::linsvm::train_ova_with(sample, TrainOptions::new(c).with_seed(seed))
}
