//! Fit preprocessing recipes on one dataset and apply them to another,
//! the way source/target feature pipelines are prepared.
//!
//! Run with: cargo run --example preprocess_recipes

use rwa::data::{fit_recipe, Dataset, RecipeKind};

fn show(label: &str, ds: &Dataset) {
    println!("{label}:");
    for i in 0..ds.n_examples() {
        println!("  row {i}: {:?}", ds.row(i));
    }
}

fn main() -> rwa::Result<()> {
    let data = Dataset::unlabeled(
        3,
        vec![
            vec![(0, -2.0), (1, 4.0), (2, 1.0)],
            vec![(0, 1.0), (2, 1.0)],
            vec![(0, 3.0), (1, -6.0), (2, 1.0)],
        ],
    )?;
    show("input (sparse, feature 2 constant)", &data);

    // Rectification keeps sparsity and drops negative activations.
    let rectify = fit_recipe(&RecipeKind::Rectify, &data)?;
    show("\nrectified", &rectify.apply(&data)?);

    // Scaling by the per-feature std keeps the sparsity pattern; the
    // constant feature passes through with divisor 1.
    let scale = fit_recipe(&RecipeKind::ScaleByStd, &data)?;
    println!(
        "\nscale-by-std preserves sparsity: {}",
        scale.preserves_sparsity()
    );
    show("scaled", &scale.apply(&data)?);

    // Full standardization destroys sparsity (mean subtraction).
    let standardize = fit_recipe(&RecipeKind::Standardize, &data)?;
    println!(
        "\nstandardize preserves sparsity: {}",
        standardize.preserves_sparsity()
    );
    show("standardized", &standardize.apply(&data)?);

    // Recipes are fit once and reused: apply the training statistics to a
    // fresh dataset with the same feature count.
    let fresh = Dataset::unlabeled(3, vec![vec![(0, 10.0), (1, 2.0)]])?;
    show(
        "\nfresh data under the fitted standardizer",
        &standardize.apply(&fresh)?,
    );

    // Chains fit each step on the output of the previous one.
    let chain = fit_recipe(
        &RecipeKind::Chain(vec![RecipeKind::Rectify, RecipeKind::ScaleByStd]),
        &data,
    )?;
    show("\nrectify then scale-by-std", &chain.apply(&data)?);
    Ok(())
}
