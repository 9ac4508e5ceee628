//! The four-point 1-D instance end to end: a two-example source at ±8
//! labels the target {−9, −1, 1, 9} through the random walk.
//!
//! Run with: cargo run --example line_walk

use rwa::adapt::{init_labels, run_rwa, RwaConfig};
use rwa::data::{generate_line_toy, Dataset};
use rwa::linsvm::{train_ova, LinearHypothesis};

fn walk(hypothesis: &LinearHypothesis, target: &Dataset, iterations: usize) -> rwa::Result<()> {
    let y0 = init_labels(hypothesis, target)?;
    println!(
        "initial labeling from the source hypothesis: {:?}",
        y0.assignments()
    );

    let cfg = RwaConfig {
        iterations,
        per_class_quota: None, // |T| / 2 = 2 per class
        c_target: 10.0,
        seed: 1,
        ..RwaConfig::new(10.0)
    };
    let (final_labeling, trace) = run_rwa(hypothesis, target, &cfg)?;

    // Count how often each distinct labeling was visited.
    let mut visits: Vec<(Vec<usize>, usize)> = Vec::new();
    for record in &trace.iterations {
        let key = record.labeling.assignments().to_vec();
        match visits.iter_mut().find(|(k, _)| *k == key) {
            Some((_, n)) => *n += 1,
            None => visits.push((key, 1)),
        }
    }
    visits.sort_by_key(|(_, n)| std::cmp::Reverse(*n));
    println!("visited labelings over {iterations} iterations:");
    for (labeling, count) in &visits {
        println!("  {labeling:?}: {count}");
    }
    println!("majority vote: {:?}\n", final_labeling.assignments());
    Ok(())
}

fn main() -> rwa::Result<()> {
    let (source, target) = generate_line_toy();
    println!(
        "source: x = -8 (class -1), x = +8 (class +1); target: {:?}\n",
        (0..4).map(|i| target.row(i)[0].1).collect::<Vec<_>>()
    );

    // The centered source starts the walk in the coordinate-sign labeling,
    // which retraining never leaves.
    let hypothesis = train_ova(&source, 1.0)?;
    walk(&hypothesis, &target, 5000)?;

    // A mildly skewed source (positive example at x = −4, small C) starts
    // the walk at (0, 1, 1, 1). The chain now genuinely mixes: both
    // labelings are visited, and the vote goes to the one with the larger
    // stationary mass — which this source hypothesis skews toward its own
    // labeling. Stability is always relative to the source anchor.
    let skewed_source =
        Dataset::from_raw_labels(1, vec![vec![(0, -8.0)], vec![(0, -4.0)]], vec![-1.0, 1.0])?;
    let skewed = train_ova(&skewed_source, 0.4)?;
    println!("--- skewed source: x = -8 (class -1), x = -4 (class +1) ---");
    walk(&skewed, &target, 5000)?;
    Ok(())
}
