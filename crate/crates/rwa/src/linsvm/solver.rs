//! Dual coordinate descent for the L2-regularized L1-loss SVM.
//!
//! Primal: min_w,b  (1/2)(‖w‖² + b²) + C Σ max(0, 1 − y_i(w·x_i + b)).
//! The bias is a constant augmented feature of value 1, so the dual is the
//! box-constrained problem min_α (1/2)αᵀQα − eᵀα, 0 ≤ α_i ≤ C, with
//! Q_ij = y_i y_j (x_i·x_j + 1), and w = Σ α_i y_i x_i, b = Σ α_i y_i.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;

pub(crate) struct SolverParams {
    pub c: f64,
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

pub(crate) struct SolverOutput {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub alpha: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
}

/// Run dual coordinate descent with a seeded random coordinate permutation
/// each epoch. Stops when the maximal projected-gradient violation over an
/// epoch falls below `tol`, or after `max_epochs` passes.
pub(crate) fn solve(data: &Dataset, signs: &[i8], params: &SolverParams) -> SolverOutput {
    let l = data.n_examples();
    let mut weights = vec![0.0; data.n_features()];
    let mut bias = 0.0;
    let mut alpha = vec![0.0; l];

    // Q_ii includes the augmented bias feature.
    let q_diag: Vec<f64> = (0..l).map(|i| data.row_norm_sq(i) + 1.0).collect();

    let mut order: Vec<usize> = (0..l).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut epochs = 0;
    let mut converged = false;
    while epochs < params.max_epochs {
        order.shuffle(&mut rng);
        let mut max_violation = 0.0f64;

        for &i in &order {
            let y = signs[i] as f64;
            let g = y * (data.dot(i, &weights) + bias) - 1.0;

            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == params.c {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());

            if pg.abs() > 1.0e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / q_diag[i]).clamp(0.0, params.c);
                let delta = (alpha[i] - old) * y;
                for &(j, v) in data.row(i) {
                    weights[j] += delta * v;
                }
                bias += delta;
            }
        }

        epochs += 1;
        if max_violation < params.tol {
            converged = true;
            break;
        }
    }

    SolverOutput {
        weights,
        bias,
        alpha,
        epochs,
        converged,
    }
}
