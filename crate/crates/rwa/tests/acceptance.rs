//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line on success (run with `--nocapture` to see them).
//!
//! Criterion 8 replaces out-of-scope external-benchmark reproduction with
//! the cross-module invariant battery at the bottom of this file.

mod common;

use common::{oracle_fixtures, qp_oracle_objective};
use rwa::adapt::{
    agreement, balanced_bootstrap, majority_vote, run_rwa, run_rwa_evaluated, EmptyClassFallback,
    Labeling, RwaConfig,
};
use rwa::chain::{
    containment_bound, enumerate_1d_labelings, generalization_bound, stationary, verify_pii_bound,
    TransitionMatrix,
};
use rwa::data::{fit_recipe, generate_line_toy, generate_rotated_toy, Dataset, RecipeKind};
use rwa::linsvm::{
    cross_validate_c, train_binary, train_ova, train_ova_with, TrainOptions, DEFAULT_C_GRID,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criterion 1 — stationary distribution of the reference 3-state matrix,
/// exact to 1e−12 per component.
#[test]
fn criterion_1_stationary_fixture() {
    let matrix = TransitionMatrix::from_rows(vec![
        vec![8.0 / 9.0, 1.0 / 9.0, 0.0],
        vec![1.0 / 4.0, 1.0 / 2.0, 1.0 / 4.0],
        vec![0.0, 1.0 / 9.0, 8.0 / 9.0],
    ])
    .unwrap();
    let pi = stationary(&matrix).unwrap();
    let expected = [9.0 / 22.0, 4.0 / 22.0, 9.0 / 22.0];
    for (got, want) in pi.pi().iter().zip(expected) {
        assert!(
            (got - want).abs() <= 1e-12,
            "stationary component {got} vs {want}"
        );
    }
    println!("criterion 1 (stationary fixture, 1e-12): PASS");
}

/// Criterion 2 — the 1-D walk with K = 5000 settles on the labeling that
/// splits the target between −1 and 1, in at least 19 of 20 seeds.
#[test]
fn criterion_2_line_toy_end_to_end() {
    let (source, target) = generate_line_toy();
    let hypothesis = train_ova(&source, 1.0).unwrap();
    let mut hits = 0;
    for seed in 0..20u64 {
        let cfg = RwaConfig {
            iterations: 5000,
            per_class_quota: None, // |T| / 2 = 2
            c_target: 10.0,
            seed,
            include_y0_in_vote: false,
            empty_class_fallback: EmptyClassFallback::Abort,
        };
        let (final_labeling, _) = run_rwa(&hypothesis, &target, &cfg).unwrap();
        if final_labeling.assignments() == [0, 0, 1, 1] {
            hits += 1;
        }
    }
    assert!(
        hits >= 19,
        "line-toy walk settled correctly in only {hits}/20 seeds"
    );
    println!("criterion 2 (line-toy end-to-end, {hits}/20 seeds): PASS");
}

/// Criterion 3 — rotated-toy convergence with K = 15 and m = n = 100
/// (50 examples per class, per-class quota 50): per-iterate accuracy
/// reaches 99% by iteration 10 in at least 18 of 20 seeds, from a
/// source-only baseline inside [75%, 92%].
///
/// The source C follows the protocol (cross-validation on the source); the
/// target-side C is fixed at 0.02, where the bootstrap margin term can pull
/// the boundary into the class gap.
#[test]
fn criterion_3_rotated_toy_convergence() {
    let mut hits = 0;
    let mut baselines = Vec::new();
    for seed in 0..20u64 {
        let (source, target) = generate_rotated_toy(50, 45.0, [0.15, 1.0], seed).unwrap();
        let c_source = cross_validate_c(&source, &DEFAULT_C_GRID, 5, seed).unwrap();
        let hypothesis =
            train_ova_with(&source, TrainOptions::new(c_source).with_seed(seed)).unwrap();
        let truth = target.labels().unwrap().to_vec();
        let unlabeled = target.strip_labels();

        let y0 = rwa::adapt::init_labels(&hypothesis, &unlabeled).unwrap();
        baselines.push(y0.agreement_with_ids(&truth));

        let cfg = RwaConfig {
            iterations: 15,
            per_class_quota: Some(50),
            c_target: 0.02,
            seed,
            include_y0_in_vote: false,
            empty_class_fallback: EmptyClassFallback::Abort,
        };
        let (_, trace) = run_rwa_evaluated(&hypothesis, &unlabeled, &cfg, Some(&truth)).unwrap();
        if trace
            .iterations
            .iter()
            .take(10)
            .any(|r| r.accuracy.expect("truth supplied") >= 0.99)
        {
            hits += 1;
        }
    }
    let mean_baseline = baselines.iter().sum::<f64>() / baselines.len() as f64;
    assert!(
        (0.75..=0.92).contains(&mean_baseline),
        "source-only baseline {mean_baseline:.3} outside [0.75, 0.92]"
    );
    assert!(
        hits >= 18,
        "reached 99% by iteration 10 in only {hits}/20 seeds"
    );
    println!(
        "criterion 3 (rotated-toy convergence, {hits}/20 seeds, baseline {mean_baseline:.3}): PASS"
    );
}

/// Criterion 4 — on the exhaustive small-fixture battery, the trainer's
/// primal objective is within 1e−4 relative of the brute-force QP oracle.
#[test]
fn criterion_4_svm_oracle_equivalence() {
    let fixtures = oracle_fixtures();
    let mut checked = 0;
    for (data, signs) in &fixtures {
        for &c in &[0.1, 1.0, 10.0] {
            let model = train_binary(data, signs, c).unwrap();
            let trained = model.primal_objective(data, signs);
            let oracle = qp_oracle_objective(data, signs, c);
            let rel = (trained - oracle).abs() / oracle.max(1.0);
            assert!(
                rel <= 1e-4,
                "n={} d={} C={c}: objective {trained} vs oracle {oracle} (rel {rel:.2e})",
                data.n_examples(),
                data.n_features()
            );
            checked += 1;
        }
    }
    println!("criterion 4 (SVM oracle equivalence on {checked} fixtures): PASS");
}

/// Criterion 5 — on every chain fixture, the Monte-Carlo self-transition
/// estimate (10⁴ draws) is at least the containment bound minus 3 binomial
/// standard deviations.
#[test]
fn criterion_5_pii_proposition() {
    let draws = 10_000;

    // Line-toy states.
    let (source, target) = generate_line_toy();
    let hypothesis = train_ova(&source, 10.0).unwrap();
    let space = enumerate_1d_labelings(&target, true).unwrap();
    let mut reports = Vec::new();
    for (i, state) in space.states().iter().enumerate() {
        let report = verify_pii_bound(&target, state, &hypothesis, 2, draws, 42, 10.0).unwrap();
        assert!(
            report.holds_within(3.0),
            "line-toy state {i}: p̂ = {:.4} < bound {:.4} − 3σ",
            report.p_ii_hat,
            report.bound
        );
        reports.push((format!("line state {i}"), report));
    }

    // Separated-blob fixture: every example of each blob within a tight
    // radius, two support vectors, m = n.
    let mut rows = Vec::new();
    let mut ids = Vec::new();
    for i in 0..10 {
        rows.push(vec![(0, -10.0 - 0.05 * i as f64)]);
        ids.push(0usize);
    }
    for i in 0..10 {
        rows.push(vec![(0, 10.0 + 0.05 * i as f64)]);
        ids.push(1usize);
    }
    let blob_target = Dataset::unlabeled(1, rows.clone()).unwrap();
    let blob_labeled = Dataset::labeled(1, rows, ids.clone(), 2).unwrap();
    let blob_h = train_ova(&blob_labeled, 10.0).unwrap();
    let y = Labeling::new(ids, 2).unwrap();
    let report = verify_pii_bound(&blob_target, &y, &blob_h, 10, draws, 9, 10.0).unwrap();
    assert!(report.holds_within(3.0), "blob fixture violates the bound");
    reports.push(("blobs".into(), report));

    for (name, r) in &reports {
        println!(
            "  {name}: p̂_ii = {:.4}, bound = {:.4}, d = {}",
            r.p_ii_hat, r.bound, r.support_count
        );
    }
    println!(
        "criterion 5 (p_ii >= containment bound on {} fixtures): PASS",
        reports.len()
    );
}

/// Criterion 6 — bound values against the high-precision oracles.
///
/// containment(4,4,2) = 30625/65536 exactly (rational oracle). The
/// generalization formula (1/(l−d))(d·ln(el/d) + ln(l/δ)) at (100, 10, 0.1)
/// evaluates to 0.44370673565469549 (40-digit evaluation), i.e. 0.443707 at
/// six decimals.
#[test]
fn criterion_6_bound_values() {
    let containment = containment_bound(4, 4, 2, false).unwrap();
    let rational = 30625_f64 / 65536_f64;
    assert!((containment - rational).abs() <= 1e-15);
    assert!((containment - 0.467300).abs() <= 1e-6);

    let generalization = generalization_bound(100, 10, 0.1).unwrap();
    assert!(
        (generalization - 0.4437067356546955).abs() <= 1e-6,
        "generalization bound {generalization}"
    );
    println!(
        "criterion 6 (bounds: containment {containment:.6}, generalization {generalization:.6}): PASS"
    );
}

/// Criterion 7 — run-to-run stability: the standard deviation of the
/// final-vote accuracy over 10 seeded repetitions on one rotated-toy
/// dataset is at most 2 percentage points.
#[test]
fn criterion_7_stochastic_stability() {
    let (source, target) = generate_rotated_toy(50, 45.0, [0.15, 1.0], 0).unwrap();
    let c_source = cross_validate_c(&source, &DEFAULT_C_GRID, 5, 0).unwrap();
    let hypothesis = train_ova_with(&source, TrainOptions::new(c_source).with_seed(0)).unwrap();
    let truth = target.labels().unwrap().to_vec();
    let unlabeled = target.strip_labels();

    let mut accuracies = Vec::new();
    for walk_seed in 0..10u64 {
        let cfg = RwaConfig {
            iterations: 500,
            per_class_quota: Some(50),
            c_target: 0.02,
            seed: walk_seed,
            include_y0_in_vote: false,
            empty_class_fallback: EmptyClassFallback::Abort,
        };
        let (vote, _) = run_rwa_evaluated(&hypothesis, &unlabeled, &cfg, Some(&truth)).unwrap();
        accuracies.push(vote.agreement_with_ids(&truth));
    }
    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    let std = (accuracies
        .iter()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / (accuracies.len() - 1) as f64)
        .sqrt();
    assert!(
        std <= 0.02,
        "final-vote accuracy std {std:.4} exceeds 2 points"
    );
    println!("criterion 7 (stability: mean {mean:.4}, std {std:.4}): PASS");
}

/// Criterion 8 — benchmark tables need external datasets and are out of
/// scope; in substitution, the cross-module invariant battery must pass.
#[test]
fn criterion_8_invariant_battery() {
    // Determinism of the full walk.
    let (source, target) = generate_rotated_toy(25, 45.0, [0.15, 1.0], 13).unwrap();
    let hypothesis = train_ova(&source, 0.001).unwrap();
    let unlabeled = target.strip_labels();
    let cfg = RwaConfig {
        iterations: 10,
        per_class_quota: Some(25),
        c_target: 0.02,
        seed: 5,
        include_y0_in_vote: false,
        empty_class_fallback: EmptyClassFallback::Abort,
    };
    let (vote_a, trace_a) = run_rwa(&hypothesis, &unlabeled, &cfg).unwrap();
    let (vote_b, trace_b) = run_rwa(&hypothesis, &unlabeled, &cfg).unwrap();
    assert_eq!(vote_a, vote_b, "walk not reproducible");
    for (a, b) in trace_a.iterations.iter().zip(&trace_b.iterations) {
        assert_eq!(a.labeling, b.labeling);
        assert_eq!(a.margin, b.margin);
    }

    // Row stochasticity with exact count accounting.
    let (line_source, line_target) = generate_line_toy();
    let line_h = train_ova(&line_source, 10.0).unwrap();
    let space = enumerate_1d_labelings(&line_target, true).unwrap();
    let est = rwa::chain::estimate_transitions(
        &space,
        &line_target,
        &line_h,
        &rwa::chain::TransitionEstimatorConfig::new(2, 500, 3, 10.0),
    )
    .unwrap();
    for (row, &over) in est.counts.iter().zip(&est.overflow_counts) {
        assert_eq!(
            row.iter().sum::<u64>() + over,
            500,
            "counts must cover every draw"
        );
    }

    // Vote dominance.
    let dominant = Labeling::new(vec![1, 0, 1], 2).unwrap();
    let mut votes = vec![dominant.clone(); 5];
    votes.push(Labeling::new(vec![0, 1, 0], 2).unwrap());
    votes.push(Labeling::new(vec![1, 1, 1], 2).unwrap());
    assert_eq!(majority_vote(&votes).unwrap(), dominant);

    // Balanced-sample exactness.
    let y = Labeling::new(vec![0, 0, 1, 1], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (sample, _) = balanced_bootstrap(
        &line_target,
        &y,
        7,
        None,
        EmptyClassFallback::Abort,
        &mut rng,
    )
    .unwrap();
    assert_eq!(sample.class_counts(), vec![7, 7]);

    // Dual feasibility and weight reconstruction.
    let signs: Vec<i8> = vec![-1, -1, 1, 1];
    let model = train_binary(&line_target, &signs, 3.0).unwrap();
    assert!(model.dual_coefs.iter().all(|&a| (0.0..=3.0).contains(&a)));
    let mut w = 0.0;
    let mut b = 0.0;
    for i in 0..4 {
        w += model.dual_coefs[i] * signs[i] as f64 * line_target.row(i)[0].1;
        b += model.dual_coefs[i] * signs[i] as f64;
    }
    assert!((model.weights[0] - w).abs() <= 1e-8 * w.abs().max(1.0));
    assert!((model.bias - b).abs() <= 1e-8 * b.abs().max(1.0));

    // Recipe idempotence (rectify) and self-standardization.
    let data = Dataset::unlabeled(
        2,
        vec![
            vec![(0, -1.0), (1, 2.0)],
            vec![(0, 3.0), (1, -4.0)],
            vec![(0, 0.5), (1, 1.0)],
        ],
    )
    .unwrap();
    let rectify = fit_recipe(&RecipeKind::Rectify, &data).unwrap();
    let once = rectify.apply(&data).unwrap();
    assert_eq!(rectify.apply(&once).unwrap(), once);
    let standardize = fit_recipe(&RecipeKind::Standardize, &data).unwrap();
    let std_out = standardize.apply(&data).unwrap();
    for j in 0..2 {
        let col: Vec<f64> = (0..3).map(|i| std_out.dense_row(i)[j]).collect();
        let mean = col.iter().sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-10);
    }

    // Agreement sanity.
    let a = Labeling::new(vec![0, 0, 1, 1], 2).unwrap();
    let c = Labeling::new(vec![0, 0, 0, 1], 2).unwrap();
    assert_eq!(agreement(&a, &c).unwrap(), 0.75);

    println!("criterion 8 (invariant battery in lieu of external benchmarks): PASS");
}
