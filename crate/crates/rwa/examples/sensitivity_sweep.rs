//! Sensitivity of the walk to the iteration count K and the per-class
//! bootstrap quota, reported as the final-vote and last-iterate accuracy
//! series. Small quotas make iterates noisy; the ensemble vote stays good.
//!
//! Run with: cargo run --release --example sensitivity_sweep

use rwa::adapt::{run_rwa_evaluated, RwaConfig};
use rwa::data::generate_rotated_toy;
use rwa::linsvm::{train_ova_with, TrainOptions};

fn main() -> rwa::Result<()> {
    let seeds: Vec<u64> = (0..10).collect();
    let iteration_grid = [10usize, 30, 100];
    let quota_grid = [3usize, 10, 50];

    println!("iterations\tquota\tmean_vote_accuracy\tmean_last_iterate_accuracy");
    for &iterations in &iteration_grid {
        for &quota in &quota_grid {
            let mut vote_sum = 0.0;
            let mut last_sum = 0.0;
            for &seed in &seeds {
                let (source, target) = generate_rotated_toy(50, 45.0, [0.15, 1.0], seed)?;
                let hypothesis = train_ova_with(&source, TrainOptions::new(0.001).with_seed(seed))?;
                let truth = target
                    .labels()
                    .expect("generator labels the target")
                    .to_vec();
                let unlabeled = target.strip_labels();
                let cfg = RwaConfig {
                    iterations,
                    per_class_quota: Some(quota),
                    c_target: 0.02,
                    seed,
                    ..RwaConfig::new(0.02)
                };
                let (vote, trace) = run_rwa_evaluated(&hypothesis, &unlabeled, &cfg, Some(&truth))?;
                vote_sum += vote.agreement_with_ids(&truth);
                last_sum += trace.iterations.last().expect("K >= 1").accuracy.unwrap();
            }
            println!(
                "{iterations}\t{quota}\t{:.4}\t{:.4}",
                vote_sum / seeds.len() as f64,
                last_sum / seeds.len() as f64
            );
        }
    }
    Ok(())
}
