//! The adaptation loop: a random walk over target labelings driven by
//! class-balanced bootstrap retraining, combined with the source
//! hypothesis, aggregated by majority vote.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::linsvm::{train_ova_with, LinearHypothesis, TrainOptions};
use crate::{Error, Result};

/// A class assignment for every target example; the state of the walk.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labeling {
    assignments: Vec<usize>,
    n_classes: usize,
}

impl Labeling {
    pub fn new(assignments: Vec<usize>, n_classes: usize) -> Result<Self> {
        if let Some(&bad) = assignments.iter().find(|&&a| a >= n_classes) {
            return Err(Error::InvalidInput(format!(
                "class {bad} out of range for {n_classes} classes"
            )));
        }
        Ok(Labeling {
            assignments,
            n_classes,
        })
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Example indices assigned to each class.
    pub fn class_pools(&self) -> Vec<Vec<usize>> {
        let mut pools = vec![Vec::new(); self.n_classes];
        for (i, &c) in self.assignments.iter().enumerate() {
            pools[c].push(i);
        }
        pools
    }

    /// Fraction of positions agreeing with a plain id slice.
    pub fn agreement_with_ids(&self, ids: &[usize]) -> f64 {
        assert_eq!(self.assignments.len(), ids.len());
        if ids.is_empty() {
            return 1.0;
        }
        let same = self
            .assignments
            .iter()
            .zip(ids)
            .filter(|(a, b)| a == b)
            .count();
        same as f64 / ids.len() as f64
    }
}

/// What to do when a provisional labeling leaves some class empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmptyClassFallback {
    /// Surface the degenerate chain state as an error (default). A labeling
    /// that puts every example in one class is an absorbing state of the
    /// walk, so continuing silently would be misleading.
    Abort,
    /// Fill the class's quota by sampling with replacement from the quota
    /// examples with the highest decision score for that class under the
    /// previous combined hypothesis. Opt-in escape hatch; uses are counted
    /// in the trace.
    TopScores,
}

/// Walk configuration. `per_class_quota = None` resolves to
/// ⌊|T| / n_classes⌋ at run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RwaConfig {
    pub iterations: usize,
    pub per_class_quota: Option<usize>,
    pub c_target: f64,
    pub seed: u64,
    pub include_y0_in_vote: bool,
    pub empty_class_fallback: EmptyClassFallback,
}

impl RwaConfig {
    /// Paper-protocol defaults: 500 iterations, quota |T|/n_classes, vote
    /// over the walk only.
    pub fn new(c_target: f64) -> Self {
        RwaConfig {
            iterations: 500,
            per_class_quota: None,
            c_target,
            seed: 0,
            include_y0_in_vote: false,
            empty_class_fallback: EmptyClassFallback::Abort,
        }
    }
}

/// One iteration's diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub labeling: Labeling,
    /// Fraction of examples whose label is unchanged from the previous step.
    pub agreement_with_prev: f64,
    /// Geometric margin of a plain SVM refit on the full relabeled target;
    /// `None` when the refit is degenerate. The refit never feeds back into
    /// the walk.
    pub margin: Option<f64>,
    /// Accuracy against ground truth, when supplied (evaluation only).
    pub accuracy: Option<f64>,
    pub wall_ms: f64,
    /// How many classes needed the empty-class fallback this iteration.
    pub fallback_uses: usize,
}

/// Full walk record: the initial labeling plus one record per iteration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RwaTrace {
    pub initial: Labeling,
    pub initial_accuracy: Option<f64>,
    pub iterations: Vec<IterationRecord>,
}

/// The initial labeling: the source hypothesis applied to the target.
pub fn init_labels(source: &LinearHypothesis, target: &Dataset) -> Result<Labeling> {
    source.predict(target)
}

/// Draw a class-balanced bootstrap sample from `(target, y)`: exactly
/// `quota` draws with replacement per class, classes in increasing order.
/// Empty classes follow `fallback`; `TopScores` needs the previous score
/// matrix. Returns the sample and the number of fallback uses.
pub fn balanced_bootstrap(
    target: &Dataset,
    y: &Labeling,
    quota: usize,
    scores: Option<&[Vec<f64>]>,
    fallback: EmptyClassFallback,
    rng: &mut ChaCha8Rng,
) -> Result<(Dataset, usize)> {
    if quota == 0 {
        return Err(Error::InvalidInput(
            "bootstrap quota must be at least 1".into(),
        ));
    }
    if y.len() != target.n_examples() {
        return Err(Error::DimensionMismatch(format!(
            "labeling covers {} examples, target has {}",
            y.len(),
            target.n_examples()
        )));
    }
    let pools = y.class_pools();
    if pools.iter().all(|p| p.is_empty()) {
        return Err(Error::InvalidInput(
            "labeling has no examples at all".into(),
        ));
    }

    let mut indices = Vec::with_capacity(quota * y.n_classes());
    let mut labels = Vec::with_capacity(quota * y.n_classes());
    let mut fallback_uses = 0usize;
    for (class, pool) in pools.iter().enumerate() {
        let pool: &[usize] = if pool.is_empty() {
            match fallback {
                EmptyClassFallback::Abort => {
                    return Err(Error::EmptyClass {
                        class,
                        context: " in the provisional labeling".into(),
                    })
                }
                EmptyClassFallback::TopScores => {
                    let scores = scores.ok_or_else(|| {
                        Error::InvalidInput(
                            "top-scores fallback needs the previous score matrix".into(),
                        )
                    })?;
                    fallback_uses += 1;
                    &top_scoring(scores, class, quota)
                }
            }
        } else {
            pool
        };
        for _ in 0..quota {
            indices.push(pool[rng.gen_range(0..pool.len())]);
            labels.push(class);
        }
    }
    let sample = target.gather(&indices, labels, y.n_classes())?;
    Ok((sample, fallback_uses))
}

/// The `quota` example indices with the highest score for `class`, ties
/// broken by example index.
fn top_scoring(scores: &[Vec<f64>], class: usize, quota: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b][class]
            .partial_cmp(&scores[a][class])
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    order.truncate(quota.min(order.len()));
    order
}

/// Run the walk: `iterations` rounds of bootstrap → retrain → combine with
/// the source → relabel, then a per-example majority vote over the visited
/// labelings. Deterministic given the config, including its seed.
pub fn run_rwa(
    source: &LinearHypothesis,
    target: &Dataset,
    cfg: &RwaConfig,
) -> Result<(Labeling, RwaTrace)> {
    run_rwa_evaluated(source, target, cfg, None)
}

/// Same as [`run_rwa`], recording per-iteration accuracy against ground
/// truth. The truth labels influence nothing but the diagnostics.
pub fn run_rwa_evaluated(
    source: &LinearHypothesis,
    target: &Dataset,
    cfg: &RwaConfig,
    truth: Option<&[usize]>,
) -> Result<(Labeling, RwaTrace)> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidInput("need at least 1 iteration".into()));
    }
    if target.n_examples() == 0 {
        return Err(Error::InvalidInput("empty target".into()));
    }
    if let Some(truth) = truth {
        if truth.len() != target.n_examples() {
            return Err(Error::DimensionMismatch(format!(
                "{} truth labels for {} target examples",
                truth.len(),
                target.n_examples()
            )));
        }
    }
    let n_classes = source.n_classes();
    let quota = match cfg.per_class_quota {
        Some(q) if q >= 1 => q,
        Some(_) => return Err(Error::InvalidInput("quota must be at least 1".into())),
        None => (target.n_examples() / n_classes).max(1),
    };

    let unlabeled = target.strip_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let initial = init_labels(source, &unlabeled)?;
    let mut prev = initial.clone();
    let mut prev_scores = source.decision_scores(&unlabeled)?;

    let mut records: Vec<IterationRecord> = Vec::with_capacity(cfg.iterations);
    for k in 1..=cfg.iterations {
        let started = Instant::now();
        let solver_seed = cfg.seed ^ (k as u64);

        // One retry with a fresh draw on training failure, then abort.
        let mut attempt = 0;
        let (hypothesis, fallback_uses) = loop {
            let (sample, fallback_uses) = balanced_bootstrap(
                &unlabeled,
                &prev,
                quota,
                Some(&prev_scores),
                cfg.empty_class_fallback,
                &mut rng,
            )?;
            match train_ova_with(
                &sample,
                TrainOptions::new(cfg.c_target).with_seed(solver_seed),
            ) {
                Ok(h) => break (h, fallback_uses),
                Err(err) if attempt == 0 => {
                    attempt = 1;
                    let _ = err;
                }
                Err(err) => {
                    return Err(Error::IterationFailed {
                        iteration: k,
                        message: err.to_string(),
                    })
                }
            }
        };

        let combined = hypothesis.combine(source)?;
        let labeling = combined.predict(&unlabeled)?;
        let scores = combined.decision_scores(&unlabeled)?;

        let margin = refit_margin(&unlabeled, &labeling, cfg.c_target, solver_seed);
        let record = IterationRecord {
            agreement_with_prev: agreement(&labeling, &prev)?,
            margin,
            accuracy: truth.map(|t| labeling.agreement_with_ids(t)),
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
            fallback_uses,
            labeling: labeling.clone(),
        };
        records.push(record);
        prev = labeling;
        prev_scores = scores;
    }

    let mut votes: Vec<&Labeling> = Vec::with_capacity(records.len() + 1);
    if cfg.include_y0_in_vote {
        votes.push(&initial);
    }
    votes.extend(records.iter().map(|r| &r.labeling));
    let final_labeling = majority_vote_refs(&votes)?;

    let trace = RwaTrace {
        initial_accuracy: truth.map(|t| initial.agreement_with_ids(t)),
        initial,
        iterations: records,
    };
    Ok((final_labeling, trace))
}

/// Geometric margin of a plain SVM refit on the relabeled target: the
/// smallest per-class margin 1/‖w_c‖. `None` when the refit is degenerate.
fn refit_margin(target: &Dataset, y: &Labeling, c: f64, seed: u64) -> Option<f64> {
    let labeled = target
        .with_label_ids(y.assignments().to_vec(), y.n_classes())
        .ok()?;
    let hypothesis = train_ova_with(&labeled, TrainOptions::new(c).with_seed(seed)).ok()?;
    let max_norm = hypothesis
        .class_weights()
        .iter()
        .map(|w| w.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    (max_norm > 0.0).then(|| 1.0 / max_norm)
}

/// Per-example plurality over labelings; ties break to the lowest class id.
pub fn majority_vote(labelings: &[Labeling]) -> Result<Labeling> {
    majority_vote_refs(&labelings.iter().collect::<Vec<_>>())
}

fn majority_vote_refs(labelings: &[&Labeling]) -> Result<Labeling> {
    let first = labelings
        .first()
        .ok_or_else(|| Error::InvalidInput("majority vote over an empty sequence".into()))?;
    let (len, n_classes) = (first.len(), first.n_classes());
    if labelings
        .iter()
        .any(|l| l.len() != len || l.n_classes() != n_classes)
    {
        return Err(Error::DimensionMismatch(
            "labelings differ in length or class count".into(),
        ));
    }

    let mut counts = vec![0usize; len * n_classes];
    for labeling in labelings {
        for (i, &c) in labeling.assignments().iter().enumerate() {
            counts[i * n_classes + c] += 1;
        }
    }
    let assignments = (0..len)
        .map(|i| {
            let row = &counts[i * n_classes..(i + 1) * n_classes];
            let mut best = 0;
            for (c, &votes) in row.iter().enumerate().skip(1) {
                if votes > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect();
    Labeling::new(assignments, n_classes)
}

/// Fraction of positions where two labelings assign the same class.
pub fn agreement(a: &Labeling, b: &Labeling) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "labelings of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.agreement_with_ids(b.assignments()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_line_toy, generate_rotated_toy};
    use crate::linsvm::train_ova;

    fn lab(ids: &[usize], n_classes: usize) -> Labeling {
        Labeling::new(ids.to_vec(), n_classes).unwrap()
    }

    fn line_source_hypothesis() -> LinearHypothesis {
        let (source, _) = generate_line_toy();
        train_ova(&source, 10.0).unwrap()
    }

    #[test]
    fn init_labels_on_line_toy() {
        let (_, target) = generate_line_toy();
        let h = line_source_hypothesis();
        let y0 = init_labels(&h, &target).unwrap();
        assert_eq!(y0.assignments(), &[0, 0, 1, 1]);
    }

    #[test]
    fn init_labels_zero_hypothesis_ties_to_class_zero() {
        let (_, target) = generate_line_toy();
        let h = LinearHypothesis::zero(2, 1).unwrap();
        let y0 = init_labels(&h, &target).unwrap();
        assert_eq!(y0.assignments(), &[0, 0, 0, 0]);
    }

    #[test]
    fn bootstrap_is_exactly_balanced() {
        let (_, target) = generate_line_toy();
        let y = lab(&[0, 0, 1, 1], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (sample, fallback) =
            balanced_bootstrap(&target, &y, 2, None, EmptyClassFallback::Abort, &mut rng).unwrap();
        assert_eq!(fallback, 0);
        assert_eq!(sample.n_examples(), 4);
        assert_eq!(sample.class_counts(), vec![2, 2]);
        // class-0 draws come from {−9, −1}, class-1 draws from {1, 9}
        for i in 0..2 {
            assert!(sample.row(i)[0].1 < 0.0);
        }
        for i in 2..4 {
            assert!(sample.row(i)[0].1 > 0.0);
        }
    }

    #[test]
    fn bootstrap_replays_identically_under_fixed_seed() {
        let (_, target) = generate_line_toy();
        let y = lab(&[0, 0, 1, 1], 2);
        let mut rng1 = ChaCha8Rng::seed_from_u64(9);
        let mut rng2 = ChaCha8Rng::seed_from_u64(9);
        let a =
            balanced_bootstrap(&target, &y, 3, None, EmptyClassFallback::Abort, &mut rng1).unwrap();
        let b =
            balanced_bootstrap(&target, &y, 3, None, EmptyClassFallback::Abort, &mut rng2).unwrap();
        assert_eq!(a.0, b.0);
    }

    #[test]
    fn two_draw_multiset_distribution_matches_enumeration() {
        // Class-1 pool is {1, 9}. Two draws with replacement produce the
        // multisets {1,1}, {1,9}, {9,9} with probabilities 1/4, 1/2, 1/4
        // (exhaustive enumeration of the 4 equiprobable ordered pairs).
        let (_, target) = generate_line_toy();
        let y = lab(&[0, 0, 1, 1], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let trials = 100_000usize;
        let mut counts = [0usize; 3];
        for _ in 0..trials {
            let (sample, _) =
                balanced_bootstrap(&target, &y, 2, None, EmptyClassFallback::Abort, &mut rng)
                    .unwrap();
            let mut pair = [sample.row(2)[0].1, sample.row(3)[0].1];
            pair.sort_by(|a, b| a.partial_cmp(b).unwrap());
            match pair {
                [a, b] if a == 1.0 && b == 1.0 => counts[0] += 1,
                [a, b] if a == 1.0 && b == 9.0 => counts[1] += 1,
                [a, b] if a == 9.0 && b == 9.0 => counts[2] += 1,
                other => panic!("unexpected class-1 values {other:?}"),
            }
        }
        for (count, p) in counts.iter().zip([0.25, 0.5, 0.25]) {
            let sigma = (p * (1.0 - p) * trials as f64).sqrt();
            let dev = (*count as f64 - p * trials as f64).abs();
            assert!(
                dev <= 3.0 * sigma,
                "count {count} deviates {dev:.1} > 3σ = {:.1}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn bootstrap_empty_class_aborts_by_default() {
        let (_, target) = generate_line_toy();
        let y = lab(&[0, 0, 0, 0], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = balanced_bootstrap(&target, &y, 2, None, EmptyClassFallback::Abort, &mut rng)
            .unwrap_err();
        assert!(matches!(err, Error::EmptyClass { class: 1, .. }));
    }

    #[test]
    fn bootstrap_top_scores_fallback_fills_quota() {
        let (_, target) = generate_line_toy();
        let y = lab(&[0, 0, 0, 0], 2);
        // Score matrix ranking example 3 then 2 highest for class 1.
        let scores = vec![
            vec![0.9, -9.0],
            vec![0.1, -1.0],
            vec![-0.1, 1.0],
            vec![-0.9, 9.0],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (sample, fallback) = balanced_bootstrap(
            &target,
            &y,
            2,
            Some(&scores),
            EmptyClassFallback::TopScores,
            &mut rng,
        )
        .unwrap();
        assert_eq!(fallback, 1);
        assert_eq!(sample.class_counts(), vec![2, 2]);
        // class-1 draws must come from the top-2 scorers, examples 2 and 3
        for i in 2..4 {
            assert!(sample.row(i)[0].1 == 1.0 || sample.row(i)[0].1 == 9.0);
        }
    }

    #[test]
    fn majority_vote_counts_and_ties() {
        let votes = [lab(&[1, 0], 2), lab(&[1, 1], 2), lab(&[0, 0], 2)];
        let v = majority_vote(&votes).unwrap();
        assert_eq!(v.assignments(), &[1, 0]);

        // perfect tie goes to the lowest class id
        let votes = [lab(&[0], 2), lab(&[1], 2)];
        assert_eq!(majority_vote(&votes).unwrap().assignments(), &[0]);

        // idempotence over identical labelings
        let same = vec![lab(&[2, 0, 1], 3); 7];
        assert_eq!(majority_vote(&same).unwrap(), same[0]);

        assert!(majority_vote(&[]).is_err());
    }

    #[test]
    fn vote_dominance() {
        // A labeling present in more than half the entries is returned exactly.
        let dominant = lab(&[1, 0, 1, 0, 1], 2);
        let mut votes = vec![dominant.clone(); 6];
        votes.push(lab(&[0, 1, 0, 1, 0], 2));
        votes.push(lab(&[1, 1, 1, 1, 1], 2));
        votes.push(lab(&[0, 0, 0, 0, 0], 2));
        assert_eq!(majority_vote(&votes).unwrap(), dominant);
    }

    #[test]
    fn agreement_values() {
        let a = lab(&[0, 0, 1, 1], 2);
        assert_eq!(agreement(&a, &a).unwrap(), 1.0);
        let b = lab(&[1, 1, 0, 0], 2);
        assert_eq!(agreement(&a, &b).unwrap(), 0.0);
        let c = lab(&[0, 0, 0, 1], 2);
        assert_eq!(agreement(&a, &c).unwrap(), 0.75);
        let short = lab(&[0], 2);
        assert!(agreement(&a, &short).is_err());
    }

    #[test]
    fn k1_final_is_first_iterate() {
        let (_, target) = generate_line_toy();
        let h = line_source_hypothesis();
        let mut cfg = RwaConfig::new(10.0);
        cfg.iterations = 1;
        cfg.per_class_quota = Some(2);
        let (final_labeling, trace) = run_rwa(&h, &target, &cfg).unwrap();
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(final_labeling, trace.iterations[0].labeling);
    }

    #[test]
    fn walk_is_reproducible() {
        let (source, target) = generate_rotated_toy(25, 45.0, [0.15, 1.0], 4).unwrap();
        let h = train_ova(&source, 1.0).unwrap();
        let mut cfg = RwaConfig::new(1.0);
        cfg.iterations = 8;
        cfg.seed = 77;
        let truth = target.labels().unwrap().to_vec();
        let (f1, t1) = run_rwa_evaluated(&h, &target, &cfg, Some(&truth)).unwrap();
        let (f2, t2) = run_rwa_evaluated(&h, &target, &cfg, Some(&truth)).unwrap();
        assert_eq!(f1, f2);
        assert_eq!(t1.initial, t2.initial);
        for (a, b) in t1.iterations.iter().zip(&t2.iterations) {
            assert_eq!(a.labeling, b.labeling);
            assert_eq!(a.agreement_with_prev, b.agreement_with_prev);
            assert_eq!(a.margin, b.margin);
            assert_eq!(a.accuracy, b.accuracy);
        }
    }

    #[test]
    fn degenerate_initial_labeling_aborts() {
        // A zero source hypothesis labels everything class 0; the first
        // bootstrap then finds class 1 empty and the default policy aborts.
        let (_, target) = generate_line_toy();
        let h = LinearHypothesis::zero(2, 1).unwrap();
        let cfg = RwaConfig::new(1.0);
        let err = run_rwa(&h, &target, &cfg).unwrap_err();
        assert!(matches!(err, Error::EmptyClass { class: 1, .. }), "{err}");
    }

    #[test]
    fn trace_has_margins_and_quota_default_resolves() {
        let (source, target) = generate_rotated_toy(20, 45.0, [0.15, 1.0], 6).unwrap();
        let h = train_ova(&source, 1.0).unwrap();
        let mut cfg = RwaConfig::new(1.0);
        cfg.iterations = 3;
        let (_, trace) = run_rwa(&h, &target, &cfg).unwrap();
        assert_eq!(trace.iterations.len(), 3);
        for rec in &trace.iterations {
            assert!(rec.margin.is_some());
            assert!(rec.margin.unwrap() > 0.0);
            assert!((0.0..=1.0).contains(&rec.agreement_with_prev));
        }
    }
}
