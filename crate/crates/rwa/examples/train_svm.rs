//! Train a binary linear SVM from scratch: support vectors, geometric
//! margin, the dual side, and C selection by cross-validation.
//!
//! Run with: cargo run --example train_svm

use rwa::data::Dataset;
use rwa::linsvm::{cross_validate_c, train_binary, train_ova, DEFAULT_C_GRID};

fn main() -> rwa::Result<()> {
    // Four points, classes split by the y-axis sign: the classic case with
    // an analytic answer (boundary y = 0, margin exactly 1).
    let rows = vec![
        vec![(0, 1.0), (1, 1.0)],
        vec![(0, -1.0), (1, 1.0)],
        vec![(0, 1.0), (1, -1.0)],
        vec![(0, -1.0), (1, -1.0)],
    ];
    let data = Dataset::unlabeled(2, rows)?;
    let signs = [1, 1, -1, -1];

    let model = train_binary(&data, &signs, 10.0)?;
    println!("weights            : {:?}", model.weights);
    println!("bias               : {:.6}", model.bias);
    println!("geometric margin   : {:.6}", model.geometric_margin()?);
    println!("support vectors    : {:?}", model.support_indices);
    println!("dual coefficients  : {:?}", model.dual_coefs);
    println!(
        "converged in {} epochs (tol {})",
        model.solver.epochs_run, model.solver.tol
    );

    // Removing non-support examples does not change the decision function;
    // here every example is a support vector, so retrain on a bigger cloud.
    let labeled = Dataset::labeled(
        2,
        vec![
            vec![(0, 0.2), (1, 1.4)],
            vec![(0, -0.3), (1, 0.9)],
            vec![(0, 0.1), (1, 2.2)],
            vec![(0, 0.4), (1, -1.2)],
            vec![(0, -0.2), (1, -0.8)],
            vec![(0, 0.0), (1, -2.5)],
        ],
        vec![1, 1, 1, 0, 0, 0],
        2,
    )?;
    let c = cross_validate_c(&labeled, &DEFAULT_C_GRID, 3, 0)?;
    println!("\ncross-validated C  : {c}");
    let hypothesis = train_ova(&labeled, c)?;
    let predicted = hypothesis.predict(&labeled)?;
    println!(
        "training accuracy  : {:.3}",
        predicted.agreement_with_ids(labeled.labels().expect("labeled"))
    );
    Ok(())
}
